"""
Numba kernels for heat-bath dynamics of the pinned SOS measure.

The single-site conditional p(k) ∝ exp(−β Σᵢ|k − nᵢ| + h·1{k=0}) on [0, M] is
handled without touching every level: k = 0 is an atom and [1, M] splits at
the sorted neighbour heights into five pieces on which the energy is linear
(slope 2j − 4 on piece j), so each piece sums as a geometric series. Sampling
is inverse-CDF with one uniform per site, located by bisection on the
cumulative mass.

A cap hit is an update whose untruncated conditional (on all k ≥ 0) puts more
than CAP_TAIL_TOL of its mass above M, whatever height is then sampled.

Uniforms are indexed by flat site (row-major), never by thread, so sweeps give
the same result for any numba thread count.
"""
import math

import numpy as np
from numba import njit, prange

import config

CAP_TAIL_TOL = config.CAP_TAIL_TOL


@njit(cache=True)
def _sort4(a, b, c, d):
    if a > b:
        a, b = b, a
    if c > d:
        c, d = d, c
    if a > c:
        a, c = c, a
    if b > d:
        b, d = d, b
    if b > c:
        b, c = c, b
    return a, b, c, d


@njit(cache=True)
def _energy(k, s0, s1, s2, s3):
    return abs(k - s0) + abs(k - s1) + abs(k - s2) + abs(k - s3)


@njit(cache=True)
def _clamp(value, low, high):
    return min(max(value, low), high)


@njit(cache=True)
def _geometric_block(log_first, slope, length, beta):
    """Σ_{t<length} exp(log_first − β·slope·t), summed from the heavier end"""
    if length <= 0:
        return 0.0
    if slope == 0:
        return math.exp(log_first) * length
    step = beta * abs(slope)
    ratio_sum = math.expm1(-step * length) / math.expm1(-step)
    if slope > 0:
        return math.exp(log_first) * ratio_sum
    return math.exp(log_first + step * (length - 1)) * ratio_sum


@njit(cache=True)
def _log_reference(s0, s1, s2, s3, beta, h, cap):
    """Largest log-weight on [0, cap]; E is convex, minimal on [s1, s2]"""
    ref = -beta * _energy(0, s0, s1, s2, s3) + h
    if cap >= 1:
        k = _clamp(s1, 1, cap)
        ref = max(ref, -beta * _energy(k, s0, s1, s2, s3))
    return ref


@njit(cache=True)
def _piece(lo, hi, end, slope, s0, s1, s2, s3, beta, ref):
    hi = min(hi, end)
    if hi <= lo:
        return 0.0
    return _geometric_block(-beta * _energy(lo, s0, s1, s2, s3) - ref, slope, hi - lo, beta)


@njit(cache=True)
def cumulative_mass(top, s0, s1, s2, s3, beta, h, cap, ref):
    """Σ_{k=0}^{top} exp(logw(k) − ref) for sorted neighbours s0 ≤ s1 ≤ s2 ≤ s3"""
    total = math.exp(-beta * _energy(0, s0, s1, s2, s3) + h - ref)
    if top < 1:
        return total
    end = top + 1
    a1 = _clamp(s0, 1, cap + 1)
    a2 = _clamp(s1, 1, cap + 1)
    a3 = _clamp(s2, 1, cap + 1)
    a4 = _clamp(s3, 1, cap + 1)
    total += _piece(1, a1, end, -4, s0, s1, s2, s3, beta, ref)
    total += _piece(a1, a2, end, -2, s0, s1, s2, s3, beta, ref)
    total += _piece(a2, a3, end, 0, s0, s1, s2, s3, beta, ref)
    total += _piece(a3, a4, end, 2, s0, s1, s2, s3, beta, ref)
    total += _piece(a4, cap + 1, end, 4, s0, s1, s2, s3, beta, ref)
    return total


@njit(cache=True)
def sample_height(u, n0, n1, n2, n3, beta, h, cap):
    """Smallest k ∈ [0, cap] whose cumulative mass reaches u·Z"""
    s0, s1, s2, s3 = _sort4(n0, n1, n2, n3)
    ref = _log_reference(s0, s1, s2, s3, beta, h, cap)
    target = u * cumulative_mass(cap, s0, s1, s2, s3, beta, h, cap, ref)
    lo = 0
    hi = cap
    while lo < hi:
        mid = (lo + hi) // 2
        if cumulative_mass(mid, s0, s1, s2, s3, beta, h, cap, ref) >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


@njit(cache=True)
def conditional_cdf(n0, n1, n2, n3, beta, h, cap, out):
    """Fill out[k] = P(height ≤ k | neighbours) for k = 0..cap"""
    s0, s1, s2, s3 = _sort4(n0, n1, n2, n3)
    ref = _log_reference(s0, s1, s2, s3, beta, h, cap)
    total = cumulative_mass(cap, s0, s1, s2, s3, beta, h, cap, ref)
    for k in range(cap + 1):
        out[k] = cumulative_mass(k, s0, s1, s2, s3, beta, h, cap, ref) / total
    return out


@njit(cache=True)
def cap_tail_fraction(n0, n1, n2, n3, beta, h, cap):
    """Share of the untruncated conditional law on [0, ∞) lying above cap"""
    s0, s1, s2, s3 = _sort4(n0, n1, n2, n3)
    ref = _log_reference(s0, s1, s2, s3, beta, h, cap)
    inside = cumulative_mass(cap, s0, s1, s2, s3, beta, h, cap, ref)
    top = max(cap, s3)
    upto = cumulative_mass(top, s0, s1, s2, s3, beta, h, top, ref)
    # above every neighbour the energy grows by 4 per level
    beyond = math.exp(-beta * _energy(top + 1, s0, s1, s2, s3) - ref) / -math.expm1(-4.0 * beta)
    return (upto - inside + beyond) / (upto + beyond)


@njit(cache=True)
def _cap_hit(n0, n1, n2, n3, beta, h, cap):
    return cap_tail_fraction(n0, n1, n2, n3, beta, h, cap) > CAP_TAIL_TOL


@njit(cache=True)
def _neighbors(heights, r, c, N):
    up = heights[r - 1, c] if r > 0 else 0
    down = heights[r + 1, c] if r < N - 1 else 0
    left = heights[r, c - 1] if c > 0 else 0
    right = heights[r, c + 1] if c < N - 1 else 0
    return up, down, left, right


def color_classes(N: int):
    """Flat indices of the two checkerboard colours, black ((r + c) even) first"""
    rows, cols = np.divmod(np.arange(N * N, dtype=np.int64), N)
    parity = (rows + cols) % 2
    return np.flatnonzero(parity == 0).astype(np.int64), np.flatnonzero(parity == 1).astype(np.int64)


@njit(parallel=True, cache=True)
def sweep_block(heights, uniforms, black, white, beta, h, cap):
    """
    Run uniforms.shape[0] checkerboard sweeps in place; returns the number of
    cap hits.
    """
    N = heights.shape[0]
    hits = 0
    for s in range(uniforms.shape[0]):
        for color in range(2):
            sites = black if color == 0 else white
            color_hits = 0
            for t in prange(sites.shape[0]):
                i = sites[t]
                r = i // N
                c = i % N
                n0, n1, n2, n3 = _neighbors(heights, r, c, N)
                k = sample_height(uniforms[s, i], n0, n1, n2, n3, beta, h, cap)
                heights[r, c] = k
                if _cap_hit(n0, n1, n2, n3, beta, h, cap):
                    color_hits += 1
            hits += color_hits
    return hits


@njit(cache=True)
def _serial_sweep(heights, row, black, white, beta, h, cap):
    N = heights.shape[0]
    hits = 0
    for color in range(2):
        sites = black if color == 0 else white
        for t in range(sites.shape[0]):
            i = sites[t]
            r = i // N
            c = i % N
            n0, n1, n2, n3 = _neighbors(heights, r, c, N)
            k = sample_height(row[i], n0, n1, n2, n3, beta, h, cap)
            heights[r, c] = k
            if _cap_hit(n0, n1, n2, n3, beta, h, cap):
                hits += 1
    return hits


@njit(cache=True)
def _state_code(heights, powers):
    N = heights.shape[0]
    code = 0
    for i in range(N * N):
        code += heights[i // N, i % N] * powers[i]
    return code


@njit(cache=True)
def sweep_block_histogram(heights, uniforms, black, white, beta, h, cap, thinning, offset, counts, powers):
    """
    Serial sweeps that add the state code to counts after every sweep whose
    index (offset + s + 1) is a multiple of thinning.
    """
    hits = 0
    for s in range(uniforms.shape[0]):
        hits += _serial_sweep(heights, uniforms[s], black, white, beta, h, cap)
        if (offset + s + 1) % thinning == 0:
            counts[_state_code(heights, powers)] += 1
    return hits


@njit(cache=True)
def sweep_replicas(stack, uniforms, black, white, beta, h, cap):
    """One sweep of every field in the stack, replica r reading uniforms[r]"""
    hits = 0
    for r in range(stack.shape[0]):
        hits += _serial_sweep(stack[r], uniforms[r], black, white, beta, h, cap)
    return hits


@njit(cache=True)
def coupled_sweep_block(lower, higher, uniforms, black, white, beta, h1, h2, cap, hits):
    """
    Sweep two chains with shared uniforms: `lower` evolves at pinning h1 (the
    dominating field), `higher` at h2 ≥ h1. Returns (sweep, site) of the first
    update after which higher > lower, or (-1, -1).
    """
    N = lower.shape[0]
    for s in range(uniforms.shape[0]):
        for color in range(2):
            sites = black if color == 0 else white
            for t in range(sites.shape[0]):
                i = sites[t]
                r = i // N
                c = i % N
                a0, a1, a2, a3 = _neighbors(lower, r, c, N)
                b0, b1, b2, b3 = _neighbors(higher, r, c, N)
                u = uniforms[s, i]
                a = sample_height(u, a0, a1, a2, a3, beta, h1, cap)
                b = sample_height(u, b0, b1, b2, b3, beta, h2, cap)
                lower[r, c] = a
                higher[r, c] = b
                if _cap_hit(a0, a1, a2, a3, beta, h1, cap):
                    hits[0] += 1
                if _cap_hit(b0, b1, b2, b3, beta, h2, cap):
                    hits[1] += 1
                if b > a:
                    return s, i
    return -1, -1
