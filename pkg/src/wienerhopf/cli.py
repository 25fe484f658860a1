"""Command-line front end.

Every subcommand prints a plain-text report of `key = value` lines and
exits 0 on success, 1 on domain errors (kernel vanishes, nonzero index,
evaluation failures), 2 on usage errors.  Numeric defaults are the
acceptance operating point: R = 200, N = 2^16, tolerance 1e-6, line
Im z = 0.
"""

from __future__ import annotations

import math
import os
import sys
import time

import click
import numpy as np

from . import core, expr, factor as factor_mod, render as render_mod
from . import solve as solve_mod, split as split_mod, transforms
from .errors import WienerHopfError

DEFAULT_GRID = (200.0, 65536)


def _parse_grid(_ctx, _param, value):
    if value is None:
        return None
    try:
        r_text, n_text = value.split(",")
        r = float(r_text)
        n = int(n_text)
    except ValueError:
        raise click.BadParameter("expected R,N (e.g. 200,65536)")
    if r <= 0:
        raise click.BadParameter("R must be positive")
    if n < 8 or n > 2**24 or (n & (n - 1)) != 0:
        raise click.BadParameter("N must be a power of two with 8 <= N <= 2^24")
    return r, n


def _parse_window(_ctx, _param, value):
    try:
        parts = [float(v) for v in value.split(",")]
    except ValueError:
        raise click.BadParameter("expected re_min,re_max,im_min,im_max")
    if len(parts) != 4 or parts[0] >= parts[1] or parts[2] >= parts[3]:
        raise click.BadParameter("window must satisfy re_min<re_max, im_min<im_max")
    return tuple(parts)


def _parse_size(_ctx, _param, value):
    try:
        w_text, h_text = value.lower().split("x")
        w, h = int(w_text), int(h_text)
    except ValueError:
        raise click.BadParameter("expected WxH (e.g. 400x400)")
    if w < 1 or h < 1:
        raise click.BadParameter("size must be positive")
    return w, h


def _parse_complex(_ctx, _param, value):
    if value is None:
        return None
    try:
        return complex(expr.evaluate(expr.parse(value), 0.0))
    except (WienerHopfError, ValueError):
        raise click.BadParameter(f"cannot parse complex constant {value!r}")


def _load_expression(expression, expr_file):
    if (expression is None) == (expr_file is None):
        raise click.UsageError("provide exactly one of --expr or --expr-file")
    if expr_file is not None:
        with open(expr_file, "r", encoding="utf-8") as fh:
            expression = fh.readline().strip()
    return expr.parse(expression), expression


def _emit(key, value):
    if isinstance(value, float):
        text = f"{value:.12g}"
    elif isinstance(value, complex):
        text = f"{value.real:.12g}{value.imag:+.12g}i"
    else:
        text = str(value)
    click.echo(f"{key} = {text}")


def _run_guarded(body):
    started = time.perf_counter()
    try:
        body()
    except WienerHopfError as err:
        _emit("error", err)
        sys.exit(1)
    _emit("elapsed_seconds", time.perf_counter() - started)


def _threads_option(fn):
    return click.option(
        "--threads", type=int,
        default=lambda: int(os.environ.get("WHF_THREADS", os.cpu_count() or 1)),
        help="Worker threads for data-parallel loops "
             "(default: WHF_THREADS or hardware count).",
    )(fn)


expr_options = [
    click.option("--expr", "expression", default=None,
                 help="Expression in the variable t (= z)."),
    click.option("--expr-file", type=click.Path(exists=True, dir_okay=False),
                 default=None, help="File whose first line is the expression."),
]


def _add(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn
    return wrap


@click.group()
def main():
    """Additive splittings, scalar factorizations, half-line convolution
    equations, and domain-coloring renders of complex functions."""


@main.command("index")
@_add(expr_options)
@click.option("--grid", callback=_parse_grid, default=None,
              help="R,N sampling parameters (default 200,65536).")
@click.option("--line", type=float, default=0.0, show_default=True,
              help="Height c of the sampling line Im z = c.")
@_threads_option
def index_cmd(expression, expr_file, grid, line, threads):
    """Winding-number index of an expression along a line."""
    def body():
        ast, source = _load_expression(expression, expr_file)
        r, n = grid or DEFAULT_GRID
        k_grid = core.make_grid(ast, line, r, n)
        kappa, residual = factor_mod.index_with_residual(k_grid)
        _emit("expr", source)
        _emit("line", line)
        _emit("grid_R", r)
        _emit("grid_N", n)
        _emit("index", kappa)
        _emit("residual", residual)
    _run_guarded(body)


@main.command("classify")
@_add(expr_options)
@click.option("--grid", callback=_parse_grid, default=None,
              help="R,N sampling parameters (default 200,65536).")
@click.option("--line", type=float, default=0.0, show_default=True)
@_threads_option
def classify_cmd(expression, expr_file, grid, line, threads):
    """Estimate the analyticity strip of an expression from one line."""
    def body():
        ast, source = _load_expression(expression, expr_file)
        r, n = grid or DEFAULT_GRID
        g = core.make_grid(ast, line, r, n)
        est = core.estimate_strip(g)
        _emit("expr", source)
        _emit("line", line)
        _emit("strip_lower", est.lower)
        _emit("strip_upper", est.upper)
        _emit("rate_plus", est.rate_plus)
        _emit("rate_minus", est.rate_minus)
        _emit("fit_residual_plus", est.residual_plus)
        _emit("fit_residual_minus", est.residual_minus)
    _run_guarded(body)


@main.command("split")
@_add(expr_options)
@click.option("--grid", callback=_parse_grid, default=None,
              help="R,N sampling parameters (default 200,65536).")
@click.option("--line", type=float, default=0.0, show_default=True)
@click.option("--eval-line", type=float, default=None,
              help="Line to sample the parts on (default: the source line).")
@click.option("--out-plus", type=click.Path(dir_okay=False), required=True)
@click.option("--out-minus", type=click.Path(dir_okay=False), required=True)
@_threads_option
def split_cmd(expression, expr_file, grid, line, eval_line, out_plus,
              out_minus, threads):
    """Additive splitting (jump problem) on a line; emits two CSVs."""
    def body():
        ast, source = _load_expression(expression, expr_file)
        r, n = grid or DEFAULT_GRID
        g = core.make_grid(ast, line, r, n)
        parts = split_mod.split_line(g)
        target = line if eval_line is None else eval_line
        plus_vals = parts.plus.line_values(target)
        minus_vals = parts.minus.line_values(target)
        core.write_line_grid(core.LineGrid(target, r, n, plus_vals), out_plus)
        core.write_line_grid(core.LineGrid(target, r, n, minus_vals), out_minus)
        recon = float(np.max(np.abs(
            parts.plus.line_values(line, corrected=False)
            + parts.minus.line_values(line, corrected=False) - g.samples)))
        _emit("expr", source)
        _emit("line", line)
        _emit("eval_line", target)
        _emit("plus_boundary", parts.plus.boundary_offset)
        _emit("minus_boundary", parts.minus.boundary_offset)
        _emit("reconstruction_error", recon)
        _emit("pw_mass_plus", split_mod.wrong_side_mass(parts.plus))
        _emit("pw_mass_minus", split_mod.wrong_side_mass(parts.minus))
        _emit("out_plus", out_plus)
        _emit("out_minus", out_minus)
    _run_guarded(body)


@main.command("factor")
@_add(expr_options)
@click.option("--grid", callback=_parse_grid, default=None,
              help="R,N sampling parameters (default 200,65536).")
@click.option("--line", type=float, default=0.0, show_default=True)
@click.option("--out-plus", type=click.Path(dir_okay=False), default=None)
@click.option("--out-minus", type=click.Path(dir_okay=False), default=None)
@_threads_option
def factor_cmd(expression, expr_file, grid, line, out_plus, out_minus, threads):
    """Multiplicative factorization on a line; emits factor CSVs and
    certificates (index is normalized away and recorded)."""
    def body():
        ast, source = _load_expression(expression, expr_file)
        r, n = grid or DEFAULT_GRID
        k_grid = core.make_grid(ast, line, r, n)
        pair = factor_mod.factor_with_normalization(k_grid)
        plus_vals = pair.plus.line_values(line)
        minus_vals = pair.minus.line_values(line)
        recon = float(np.max(np.abs(
            pair.reconstruct(k_grid, corrected=False) - k_grid.samples)))
        _emit("expr", source)
        _emit("line", line)
        _emit("grid_R", r)
        _emit("grid_N", n)
        _emit("index", pair.index_removed)
        _emit("normalization", pair.normalization)
        _emit("reconstruction_error", recon)
        _emit("min_abs_plus", float(np.min(np.abs(plus_vals))))
        _emit("min_abs_minus", float(np.min(np.abs(minus_vals))))
        _emit("pw_mass_log_plus", split_mod.wrong_side_mass(pair.plus))
        _emit("pw_mass_log_minus", split_mod.wrong_side_mass(pair.minus))
        if out_plus:
            core.write_line_grid(core.LineGrid(line, r, n, plus_vals), out_plus)
            _emit("out_plus", out_plus)
        if out_minus:
            core.write_line_grid(core.LineGrid(line, r, n, minus_vals), out_minus)
            _emit("out_minus", out_minus)
    _run_guarded(body)


@main.command("solve")
@click.option("--kernel-expr", required=True,
              help="Kernel k(x) of the half-line convolution.")
@click.option("--rhs-expr", required=True,
              help="Right-hand side g(x), used on x > 0.")
@click.option("--second-kind", "lam", callback=_parse_complex, default=None,
              help="Solve f + LAMBDA * (k*f) = g with this constant.")
@click.option("--first-kind", is_flag=True, default=False,
              help="Solve (k*f) = g.")
@click.option("--time", "time_grid", callback=_parse_grid, default=None,
              help="T,N time grid (default 30,4096).")
@click.option("--grid", callback=_parse_grid, default=None,
              help="R,N transform grid; used when --time is omitted.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="CSV path for the recovered f samples.")
@_threads_option
def solve_cmd(kernel_expr, rhs_expr, lam, first_kind, time_grid, grid, out,
              threads):
    """Solve a half-line convolution equation."""
    if first_kind == (lam is not None):
        raise click.UsageError("choose exactly one of --first-kind / --second-kind")
    def body():
        if time_grid is not None:
            t_half, n = time_grid
        elif grid is not None:
            r, n = grid
            t_half = n * math.pi / (2.0 * r)
        else:
            t_half, n = 30.0, 4096
        k = core.make_time_grid(expr.parse(kernel_expr), t_half, n)
        g = core.make_time_grid(expr.parse(rhs_expr), t_half, n)
        form = solve_mod.FirstKind() if first_kind else solve_mod.SecondKind(lam)
        problem = solve_mod.HalfLineConvProblem(k, g, form)
        f, sol = solve_mod.solve_halfline(problem)
        applied = solve_mod.forward_apply(problem, f)
        if first_kind:
            recon = applied.samples
        else:
            recon = f.samples + lam * applied.samples
        pos = f.abscissae > 0
        num = float(np.sqrt(np.sum(np.abs(recon[pos] - g.samples[pos]) ** 2)))
        den = float(np.sqrt(np.sum(np.abs(g.samples[pos]) ** 2)))
        _emit("kernel_expr", kernel_expr)
        _emit("rhs_expr", rhs_expr)
        _emit("form", "first" if first_kind else "second")
        if not first_kind:
            _emit("lambda", lam)
        _emit("time_T", t_half)
        _emit("time_N", n)
        _emit("equation_residual", sol.residual)
        _emit("roundtrip_relative_l2", num / den if den > 0 else 0.0)
        strip = solve_mod.reduce_to_wh(problem).strip
        _emit("strip_lower", strip.lower if strip else "collapsed")
        _emit("strip_upper", strip.upper if strip else "collapsed")
        if out:
            core.write_time_grid(f, out)
            _emit("out", out)
    _run_guarded(body)


@main.command("rh-solve")
@click.option("--coeff-expr", required=True,
              help="Coefficient D(t) of D F- + H = F+.")
@click.option("--rhs-expr", required=True, help="Data H(t).")
@click.option("--grid", callback=_parse_grid, default=None,
              help="R,N sampling parameters (default 200,65536).")
@click.option("--line", type=float, default=0.0, show_default=True)
@click.option("--out-plus", type=click.Path(dir_okay=False), default=None)
@click.option("--out-minus", type=click.Path(dir_okay=False), default=None)
@_threads_option
def rh_solve_cmd(coeff_expr, rhs_expr, grid, line, out_plus, out_minus, threads):
    """Solve the boundary relation D(t) F-(t) + H(t) = F+(t)."""
    def body():
        r, n = grid or DEFAULT_GRID
        d_grid = core.make_grid(expr.parse(coeff_expr), line, r, n)
        h_grid = core.make_grid(expr.parse(rhs_expr), line, r, n)
        f_plus, f_minus, pair = solve_mod.solve_riemann_hilbert(d_grid, h_grid)
        fp = f_plus.line_values(line, corrected=False)
        fm = f_minus.line_values(line, corrected=False)
        residual = float(np.max(np.abs(
            d_grid.samples * fm + h_grid.samples - fp)))
        _emit("coeff_expr", coeff_expr)
        _emit("rhs_expr", rhs_expr)
        _emit("line", line)
        _emit("boundary_residual", residual)
        _emit("coeff_normalization", pair.normalization)
        if out_plus:
            core.write_line_grid(core.LineGrid(line, r, n, fp), out_plus)
            _emit("out_plus", out_plus)
        if out_minus:
            core.write_line_grid(core.LineGrid(line, r, n, fm), out_minus)
            _emit("out_minus", out_minus)
    _run_guarded(body)


@main.command("render")
@_add(expr_options)
@click.option("--window", callback=_parse_window, required=True,
              help="re_min,re_max,im_min,im_max of the view.")
@click.option("--size", callback=_parse_size, required=True, help="WxH pixels.")
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Output PPM path.")
@_threads_option
def render_cmd(expression, expr_file, window, size, out, threads):
    """Domain-coloring image of an expression (binary PPM)."""
    def body():
        ast, source = _load_expression(expression, expr_file)
        width, height = size

        def f(z):
            return expr.evaluate_masked(ast, z)[0]

        img = render_mod.domain_color(f, window, width, height, threads=threads)
        render_mod.write_ppm(img, out)
        _emit("expr", source)
        _emit("window", ",".join(f"{v:g}" for v in window))
        _emit("size", f"{width}x{height}")
        _emit("threads", threads)
        _emit("out", out)
    _run_guarded(body)


if __name__ == "__main__":
    main()
