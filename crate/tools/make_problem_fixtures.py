#!/usr/bin/env python3
"""Independent reference implementation of the DTLZ and WFG benchmark
families, used to freeze evaluation fixtures for the Rust test suite.

The implementations here are written directly from the canonical problem
definitions in a vectorised numpy style, deliberately structured differently
from the Rust code (whole-suite pipelines over point batches vs. per-point
evaluation) so that agreement between the two is meaningful evidence.

Before any fixture is written, the reference itself is validated against
closed-form identities of the problem families:

* DTLZ1 with all distance variables at 0.5 satisfies sum(f) = 0.5.
* DTLZ2-5 with distance variables at 0.5 (DTLZ6 at 0.0) satisfy
  sum(f^2) = 1.
* DTLZ7 at x = 0 gives f = (0, ..., 0, 2M).
* WFG1 at x = 0 gives f = (1, ..., 1, 2M + 1).
* WFG3 at optimal distance variables satisfies sum(f_m / (2m)) = 1.
* WFG4-9 at (constructed) optimal distance variables satisfy
  sum((f_m / (2m))^2) = 1, including the sequential solve needed for
  WFG8 and the backward solve for WFG9.

Running this script overwrites crates/mobo/tests/data/*.json.
"""

import json
import pathlib
import sys

import numpy as np

OUT_DIR = pathlib.Path(__file__).resolve().parent.parent / "crates" / "mobo" / "tests" / "data"
N_POINTS = 100
BASE_SEED = 20260816


# --------------------------------------------------------------------------
# WFG transformation toolbox. All functions map arrays in [0,1] to [0,1].
# --------------------------------------------------------------------------

def b_poly(y, alpha):
    return np.power(y, alpha)


def b_flat(y, a, b, c):
    v = a + np.minimum(0.0, np.floor(y - b)) * a * (b - y) / b
    v = v - np.minimum(0.0, np.floor(c - y)) * (1.0 - a) * (y - c) / (1.0 - c)
    # Clean up tiny negative round-off so downstream powers stay real.
    return np.clip(v, 0.0, 1.0)


def b_param(y, u, a, b, c):
    e = b + (c - b) * (a - (1.0 - 2.0 * u) * np.abs(np.floor(0.5 - u) + a))
    return np.power(y, e)


def s_linear(y, a):
    return np.abs(y - a) / np.abs(np.floor(a - y) + a)


def s_decept(y, a, b, c):
    lead = np.floor(y - a + b) * (1.0 - c + (a - b) / b) / (a - b)
    trail = np.floor(a + b - y) * (1.0 - c + (1.0 - a - b) / b) / (1.0 - a - b)
    return 1.0 + (np.abs(y - a) - b) * (lead + trail + 1.0 / b)


def s_multi(y, a, b, c):
    ratio = np.abs(y - c) / (2.0 * (np.floor(c - y) + c))
    return (
        1.0
        + np.cos((4.0 * a + 2.0) * np.pi * (0.5 - ratio))
        + 4.0 * b * ratio * ratio
    ) / (b + 2.0)


def r_sum(ys, ws):
    """Weighted mean over the last axis; ys is (n_points, group)."""
    ws = np.asarray(ws, dtype=float)
    return ys @ ws / ws.sum()


def r_nonsep(ys, a):
    """Non-separable reduction over the last axis with degree a."""
    n = ys.shape[1]
    total = np.zeros(ys.shape[0])
    for j in range(n):
        inner = ys[:, j].copy()
        for k in range(a - 1):
            inner = inner + np.abs(ys[:, j] - ys[:, (j + k + 1) % n])
        total += inner
    half_up = -(-a // 2)  # ceil(a / 2)
    denom = (n / a) * half_up * (1.0 + 2.0 * a - 2.0 * half_up)
    return total / denom


# --------------------------------------------------------------------------
# WFG shape functions. xs is (n_points, M); each returns (n_points,).
# --------------------------------------------------------------------------

def sh_linear(xs, m, big_m):
    if m == 1:
        return np.prod(xs[:, : big_m - 1], axis=1)
    if m == big_m:
        return 1.0 - xs[:, 0]
    return np.prod(xs[:, : big_m - m], axis=1) * (1.0 - xs[:, big_m - m])


def sh_convex(xs, m, big_m):
    if m == 1:
        return np.prod(1.0 - np.cos(xs[:, : big_m - 1] * np.pi / 2.0), axis=1)
    if m == big_m:
        return 1.0 - np.sin(xs[:, 0] * np.pi / 2.0)
    head = np.prod(1.0 - np.cos(xs[:, : big_m - m] * np.pi / 2.0), axis=1)
    return head * (1.0 - np.sin(xs[:, big_m - m] * np.pi / 2.0))


def sh_concave(xs, m, big_m):
    if m == 1:
        return np.prod(np.sin(xs[:, : big_m - 1] * np.pi / 2.0), axis=1)
    if m == big_m:
        return np.cos(xs[:, 0] * np.pi / 2.0)
    head = np.prod(np.sin(xs[:, : big_m - m] * np.pi / 2.0), axis=1)
    return head * np.cos(xs[:, big_m - m] * np.pi / 2.0)


def sh_mixed(xs, alpha, big_a):
    x1 = xs[:, 0]
    angle = 2.0 * big_a * np.pi
    return np.power(1.0 - x1 - np.cos(angle * x1 + np.pi / 2.0) / angle, alpha)


def sh_disc(xs, alpha, beta, big_a):
    x1 = xs[:, 0]
    return 1.0 - np.power(x1, alpha) * np.cos(big_a * np.power(x1, beta) * np.pi) ** 2


# --------------------------------------------------------------------------
# Suite plumbing shared by every WFG problem.
# --------------------------------------------------------------------------

def position_groups(k, big_m):
    """1-based inclusive index ranges slicing 1..k into M-1 groups."""
    edges = [(m * k) // (big_m - 1) for m in range(big_m)]
    return [(edges[m] + 1, edges[m + 1]) for m in range(big_m - 1)]


def finish(t, big_m, degenerate, shapes):
    """Mix the final transition vector t (n_points, M) into objectives."""
    n_pts = t.shape[0]
    x = np.empty_like(t)
    x_m = t[:, big_m - 1]
    for i in range(big_m - 1):
        a_i = 1.0 if (i == 0 or not degenerate) else 0.0
        x[:, i] = np.maximum(x_m, a_i) * (t[:, i] - 0.5) + 0.5
    x[:, big_m - 1] = x_m
    f = np.empty((n_pts, big_m))
    for m in range(1, big_m + 1):
        f[:, m - 1] = x_m + 2.0 * m * shapes(x, m)
    return f


def reduce_sum_groups(y, k, big_m, weights_fn):
    """Standard r_sum reduction: M-1 position groups plus one distance tail."""
    n = y.shape[1]
    t = np.empty((y.shape[0], big_m))
    for m, (lo, hi) in enumerate(position_groups(k, big_m)):
        ws = [weights_fn(i) for i in range(lo, hi + 1)]
        t[:, m] = r_sum(y[:, lo - 1 : hi], ws)
    ws = [weights_fn(i) for i in range(k + 1, n + 1)]
    t[:, big_m - 1] = r_sum(y[:, k:], ws)
    return t


def reduce_nonsep_groups(y, k, big_m):
    """r_nonsep over each position group (degree = group size) and the tail."""
    n = y.shape[1]
    t = np.empty((y.shape[0], big_m))
    for m, (lo, hi) in enumerate(position_groups(k, big_m)):
        t[:, m] = r_nonsep(y[:, lo - 1 : hi], hi - lo + 1)
    t[:, big_m - 1] = r_nonsep(y[:, k:], n - k)
    return t


def pair_reduce(y, k, l):
    """WFG2/3 pairwise non-separable reduction of the distance variables.

    Produces k + floor(l/2) columns; an odd trailing distance variable is
    unused, matching the convention adopted by the Rust implementation.
    """
    half = l // 2
    cols = [y[:, :k]]
    for i in range(half):
        pair = y[:, k + 2 * i : k + 2 * i + 2]
        cols.append(r_nonsep(pair, 2)[:, None])
    return np.concatenate(cols, axis=1)


PARAM_A = 0.98 / 49.98
PARAM_B = 0.02
PARAM_C = 50.0


def wfg_evaluate(problem, x, k, big_m):
    """Evaluate a WFG problem on x in [0,1]^(n_points, d)."""
    n = x.shape[1]
    l = n - k
    y = x.copy()  # z_i / (2i) recovers the unit-cube coordinates exactly

    if problem == 1:
        y[:, k:] = s_linear(y[:, k:], 0.35)
        y[:, k:] = b_flat(y[:, k:], 0.8, 0.75, 0.85)
        y = b_poly(y, 0.02)
        t = reduce_sum_groups(y, k, big_m, lambda i: 2.0 * i)
        shapes = lambda xs, m: (
            sh_mixed(xs, 1.0, 5.0) if m == big_m else sh_convex(xs, m, big_m)
        )
        return finish(t, big_m, False, shapes)

    if problem in (2, 3):
        y[:, k:] = s_linear(y[:, k:], 0.35)
        y = pair_reduce(y, k, l)
        t = reduce_sum_groups(y, k, big_m, lambda i: 1.0)
        if problem == 2:
            shapes = lambda xs, m: (
                sh_disc(xs, 1.0, 1.0, 5.0) if m == big_m else sh_convex(xs, m, big_m)
            )
            return finish(t, big_m, False, shapes)
        shapes = lambda xs, m: sh_linear(xs, m, big_m)
        return finish(t, big_m, True, shapes)

    if problem == 4:
        y = s_multi(y, 30.0, 10.0, 0.35)
        t = reduce_sum_groups(y, k, big_m, lambda i: 1.0)
        return finish(t, big_m, False, lambda xs, m: sh_concave(xs, m, big_m))

    if problem == 5:
        y = s_decept(y, 0.35, 0.001, 0.05)
        t = reduce_sum_groups(y, k, big_m, lambda i: 1.0)
        return finish(t, big_m, False, lambda xs, m: sh_concave(xs, m, big_m))

    if problem == 6:
        y[:, k:] = s_linear(y[:, k:], 0.35)
        t = reduce_nonsep_groups(y, k, big_m)
        return finish(t, big_m, False, lambda xs, m: sh_concave(xs, m, big_m))

    if problem == 7:
        shifted = y.copy()
        for i in range(k):
            u = r_sum(y[:, i + 1 :], np.ones(n - i - 1))
            shifted[:, i] = b_param(y[:, i], u, PARAM_A, PARAM_B, PARAM_C)
        y = shifted
        y[:, k:] = s_linear(y[:, k:], 0.35)
        t = reduce_sum_groups(y, k, big_m, lambda i: 1.0)
        return finish(t, big_m, False, lambda xs, m: sh_concave(xs, m, big_m))

    if problem == 8:
        shifted = y.copy()
        for i in range(k, n):
            u = r_sum(y[:, :i], np.ones(i))
            shifted[:, i] = b_param(y[:, i], u, PARAM_A, PARAM_B, PARAM_C)
        y = shifted
        y[:, k:] = s_linear(y[:, k:], 0.35)
        t = reduce_sum_groups(y, k, big_m, lambda i: 1.0)
        return finish(t, big_m, False, lambda xs, m: sh_concave(xs, m, big_m))

    if problem == 9:
        shifted = y.copy()
        for i in range(n - 1):
            u = r_sum(y[:, i + 1 :], np.ones(n - i - 1))
            shifted[:, i] = b_param(y[:, i], u, PARAM_A, PARAM_B, PARAM_C)
        y = shifted
        y[:, :k] = s_decept(y[:, :k], 0.35, 0.001, 0.05)
        y[:, k:] = s_multi(y[:, k:], 30.0, 95.0, 0.35)
        t = reduce_nonsep_groups(y, k, big_m)
        return finish(t, big_m, False, lambda xs, m: sh_concave(xs, m, big_m))

    raise ValueError(f"unknown WFG index {problem}")


# --------------------------------------------------------------------------
# DTLZ family.
# --------------------------------------------------------------------------

def dtlz_g1(xd):
    z = xd - 0.5
    return 100.0 * (xd.shape[1] + np.sum(z * z - np.cos(20.0 * np.pi * z), axis=1))


def dtlz_g2(xd):
    z = xd - 0.5
    return np.sum(z * z, axis=1)


def dtlz_angular(theta, g, big_m):
    """Hyper-spherical objective construction shared by DTLZ2-6.

    theta holds angles in radians, shape (n_points, M-1).
    """
    n_pts = theta.shape[0]
    f = np.empty((n_pts, big_m))
    for m in range(1, big_m + 1):
        v = 1.0 + g
        v = v * np.prod(np.cos(theta[:, : big_m - m]), axis=1)
        if m > 1:
            v = v * np.sin(theta[:, big_m - m])
        f[:, m - 1] = v
    return f


def dtlz_evaluate(problem, x, big_m):
    n = x.shape[1]
    xp = x[:, : big_m - 1]
    xd = x[:, big_m - 1 :]

    if problem == 1:
        g = dtlz_g1(xd)
        n_pts = x.shape[0]
        f = np.empty((n_pts, big_m))
        for m in range(1, big_m + 1):
            v = 0.5 * (1.0 + g) * np.prod(xp[:, : big_m - m], axis=1)
            if m > 1:
                v = v * (1.0 - xp[:, big_m - m])
            f[:, m - 1] = v
        return f

    if problem in (2, 3, 4):
        g = dtlz_g1(xd) if problem == 3 else dtlz_g2(xd)
        pos = np.power(xp, 100.0) if problem == 4 else xp
        theta = pos * np.pi / 2.0
        return dtlz_angular(theta, g, big_m)

    if problem in (5, 6):
        if problem == 5:
            g = dtlz_g2(xd)
        else:
            g = np.sum(np.power(xd, 0.1), axis=1)
        theta = np.empty_like(xp)
        theta[:, 0] = xp[:, 0] * np.pi / 2.0
        if big_m > 2:
            gg = g[:, None]
            theta[:, 1:] = np.pi / (4.0 * (1.0 + gg)) * (1.0 + 2.0 * gg * xp[:, 1:])
        return dtlz_angular(theta, g, big_m)

    if problem == 7:
        g = 1.0 + 9.0 * np.mean(xd, axis=1)
        f = np.empty((x.shape[0], big_m))
        f[:, : big_m - 1] = xp
        ratio = xp / (1.0 + g[:, None])
        h = big_m - np.sum(ratio * (1.0 + np.sin(3.0 * np.pi * xp)), axis=1)
        f[:, big_m - 1] = (1.0 + g) * h
        return f

    raise ValueError(f"unknown DTLZ index {problem}")


# --------------------------------------------------------------------------
# Validation identities.
# --------------------------------------------------------------------------

def default_wfg_kl(d, big_m):
    k = 4 if big_m == 2 else 2 * big_m - 1
    return k, d - k


def param_exponent(u):
    return PARAM_B + (PARAM_C - PARAM_B) * (
        PARAM_A - (1.0 - 2.0 * u) * abs(np.floor(0.5 - u) + PARAM_A)
    )


def wfg_optimal_distance(problem, x_pos, k, l):
    """Distance-variable settings that land exactly on the trade-off front."""
    n = k + l
    if problem in (1, 2, 3, 4, 5, 6, 7):
        return np.full(l, 0.35)
    if problem == 8:
        xs = np.concatenate([x_pos, np.zeros(l)])
        for i in range(k, n):
            u = xs[:i].mean()
            xs[i] = 0.35 ** (1.0 / param_exponent(u))
        return xs[k:]
    if problem == 9:
        xs = np.zeros(n)
        xs[:k] = x_pos
        xs[n - 1] = 0.35
        for i in range(n - 2, k - 1, -1):
            u = xs[i + 1 :].mean()
            xs[i] = 0.35 ** (1.0 / param_exponent(u))
        return xs[k:]
    raise ValueError(problem)


def check(ok, label):
    if not ok:
        print(f"FAILED identity: {label}", file=sys.stderr)
        sys.exit(1)
    print(f"  ok: {label}")


def validate(configs):
    rng = np.random.default_rng(777)
    for d, big_m in configs:
        k, l = default_wfg_kl(d, big_m)

        # DTLZ identities.
        pos = rng.random((20, big_m - 1))
        x = np.concatenate([pos, np.full((20, d - big_m + 1), 0.5)], axis=1)
        f1 = dtlz_evaluate(1, x, big_m)
        check(np.allclose(f1.sum(axis=1), 0.5, atol=1e-9), f"DTLZ1({d},{big_m}) plane sum")
        for p in (2, 3, 4, 5):
            fp = dtlz_evaluate(p, x, big_m)
            check(
                np.allclose((fp * fp).sum(axis=1), 1.0, atol=1e-9),
                f"DTLZ{p}({d},{big_m}) unit sphere",
            )
        x6 = np.concatenate([pos, np.zeros((20, d - big_m + 1))], axis=1)
        f6 = dtlz_evaluate(6, x6, big_m)
        check(np.allclose((f6 * f6).sum(axis=1), 1.0, atol=1e-9), f"DTLZ6({d},{big_m}) unit sphere")
        f7 = dtlz_evaluate(7, np.zeros((1, d)), big_m)
        want = np.array([0.0] * (big_m - 1) + [2.0 * big_m])
        check(np.allclose(f7[0], want, atol=1e-12), f"DTLZ7({d},{big_m}) at origin")

        # WFG identities.
        f = wfg_evaluate(1, np.zeros((1, d)), k, big_m)
        want = np.array([1.0] * (big_m - 1) + [2.0 * big_m + 1.0])
        check(np.allclose(f[0], want, atol=1e-9), f"WFG1({d},{big_m}) at origin")

        for p in range(3, 10):
            rows = []
            for _ in range(20):
                xp = rng.random(k)
                xd = wfg_optimal_distance(p, xp, k, l)
                rows.append(np.concatenate([xp, xd]))
            f = wfg_evaluate(p, np.array(rows), k, big_m)
            scaled = f / (2.0 * np.arange(1, big_m + 1))
            if p == 3:
                check(
                    np.allclose(scaled.sum(axis=1), 1.0, atol=1e-9),
                    f"WFG3({d},{big_m}) linear front",
                )
            else:
                check(
                    np.allclose((scaled * scaled).sum(axis=1), 1.0, atol=1e-9),
                    f"WFG{p}({d},{big_m}) spherical front",
                )

    # WFG2 hand value: d=6, M=2, position x1=0.5, optimal distance.
    k, l = default_wfg_kl(6, 2)
    x = np.concatenate([np.full(k, 0.5), np.full(l, 0.35)])[None, :]
    f = wfg_evaluate(2, x, k, 2)
    want0 = 2.0 * (1.0 - np.cos(0.5 * np.pi / 2.0))
    want1 = 4.0 * (1.0 - 0.5 * np.cos(5.0 * 0.5 * np.pi) ** 2)
    check(np.allclose(f[0], [want0, want1], atol=1e-9), "WFG2(6,2) hand value")


# --------------------------------------------------------------------------
# Fixture writing.
# --------------------------------------------------------------------------

def fnv1a(text):
    h = 0xCBF29CE484222325
    for byte in text.encode():
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def write_fixture(name, d, big_m, evaluate):
    rng = np.random.default_rng(BASE_SEED ^ fnv1a(f"{name}_{d}_{big_m}") % (2**32))
    x = rng.random((N_POINTS, d))
    f = evaluate(x)
    payload = {
        "problem": f"{name}_{d}_{big_m}",
        "d": d,
        "m": big_m,
        "x": [[float(v) for v in row] for row in x],
        "f": [[float(v) for v in row] for row in f],
    }
    path = OUT_DIR / f"{name.lower()}_{d}_{big_m}.json"
    path.write_text(json.dumps(payload))
    return path


def main():
    configs = [(6, 2), (10, 3)]
    print("validating reference implementation:")
    validate(configs)

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    written = []
    for d, big_m in configs:
        k, _ = default_wfg_kl(d, big_m)
        for p in range(1, 10):
            written.append(
                write_fixture(
                    f"WFG{p}", d, big_m, lambda x, p=p, k=k, m=big_m: wfg_evaluate(p, x, k, m)
                )
            )
        for p in range(1, 8):
            written.append(
                write_fixture(
                    f"DTLZ{p}", d, big_m, lambda x, p=p, m=big_m: dtlz_evaluate(p, x, m)
                )
            )
    print(f"wrote {len(written)} fixtures to {OUT_DIR}")


if __name__ == "__main__":
    main()
