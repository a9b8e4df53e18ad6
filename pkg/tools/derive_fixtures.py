#!/usr/bin/env python3
"""Derive the frozen numbers in twophase/problems.py.

The published benchmark tables print states, not wave speeds.  This
script recovers the construction parameters:

* RP1/RP2/RP4: wave speeds recovered from mass-flux continuity of the
  tabulated states round to exact values (-2.5, -2, 1, 1.5; 0.5, 1;
  -+409, -+1682), which are frozen directly in the presets.
* RP3: the fan far-edge speeds are recomputed here from the tabulated
  edge densities through the rarefaction invariants.
* RP5/RP6: only the initial data and the wave pattern are published;
  the contact seed and the wave speeds are recovered by shooting on the
  inverse construction until it reproduces the initial data.

Run from the repository root:  python3 tools/derive_fixtures.py
"""

import numpy as np
from scipy.optimize import root

from twophase.eos import BarotropicEos, EosPair
from twophase.exact import build_solution, raref, shock
from twophase.state import PrimitiveState
from twophase.waves import family_from_key

IDEAL_PAIR = EosPair(BarotropicEos(1.0, 1.4), BarotropicEos(1.0, 2.0))
STIFF_PAIR = EosPair(
    BarotropicEos(1e5, 1.4, 1.0, 0.0),
    BarotropicEos(8.5e8, 2.8, 1e3, 8.4999e8),
)


def rp3_targets():
    """Fan far-edge speeds of the symmetric double rarefaction.

    The center states (160, 200, 0, 0) and the outer edge densities
    are tabulated; the edge velocities follow from the invariants, and
    the far-edge speed is u - a there (left side).
    """
    e1, e2 = STIFF_PAIR.phase1, STIFF_PAIR.phase2
    rho1_star, rho2_star = 160.0, 200.0
    rho1_outer, rho2_outer = 789.79932, 1270.0579
    u1_outer = 0.0 - e1.riemann_integral(rho1_star, rho1_outer)
    u2_outer = 0.0 - e2.riemann_integral(rho2_star, rho2_outer)
    t1 = u1_outer - e1.sound_speed(rho1_outer)
    t2 = u2_outer - e2.sound_speed(rho2_outer)
    print("RP3 left fan targets:")
    print(f"  lambda2- tail = {t2!r}   (outer u2 = {u2_outer!r}, table -1722.9353/4)")
    print(f"  lambda1- tail = {t1!r}   (outer u1 = {u1_outer!r}, table -1942.0873)")
    return t1, t2


def _shoot_fans_only(name, left, right, alpha_left, alpha_right, pair):
    """Seed solve when every wave is a rarefaction: the four fan
    invariants link the contact states to the data directly."""
    e1, e2 = pair.phase1, pair.phase2

    def invariants(state, sign):
        # u -+ integral a/rho for each phase, anchored at rho = 1
        i1 = state.u1 + sign * e1.riemann_integral(1.0, state.rho1)
        i2 = state.u2 + sign * e2.riemann_integral(1.0, state.rho2)
        return np.array([i1, i2])

    targetL = invariants(left, +1)   # minus family conserves u + I
    targetR = invariants(right, -1)  # plus family conserves u - I

    from twophase.waves import contact_connect

    def residual(x):
        try:
            seed = PrimitiveState(alpha_left, *x)
            cr = contact_connect(seed, alpha_right, pair)
        except Exception:
            return np.full(4, 1e3)
        return np.concatenate(
            [invariants(seed, +1) - targetL, invariants(cr, -1) - targetR]
        )

    x0 = np.array([0.5 * left.rho1, 0.5 * left.rho2, 0.0, 0.0])
    sol = root(residual, x0, method="hybr", tol=1e-14)
    assert sol.success, sol.message
    seed = PrimitiveState(alpha_left, *sol.x)
    print(f"{name} contact-left seed: {list(sol.x)!r}")
    return seed


def _finish_fan_problem(name, seed, alpha_right, left, right, pair):
    from twophase.waves import contact_connect

    cr = contact_connect(seed, alpha_right, pair)
    speeds = {
        "1-": family_from_key("1-").speed_of(left, pair),
        "2-": family_from_key("2-").speed_of(left, pair),
        "1+": family_from_key("1+").speed_of(right, pair),
        "2+": family_from_key("2+").speed_of(right, pair),
    }
    print(f"{name} fan targets: {speeds!r}")
    sol = build_solution(
        seed,
        alpha_right,
        [raref("1-", speeds["1-"]), raref("2-", speeds["2-"])],
        [raref("1+", speeds["1+"]), raref("2+", speeds["2+"])],
        pair,
    )
    errL = np.max(np.abs(sol.left_state.as_array() - left.as_array()))
    errR = np.max(np.abs(sol.right_state.as_array() - right.as_array()))
    print(f"{name} data reproduction error: left {errL:.3e}, right {errR:.3e}")
    return speeds


def rp5():
    left = PrimitiveState(0.7, 2.0, 1.0, -2.0, -1.0)
    right = PrimitiveState(0.3, 2.0, 1.0, 2.0, 1.0)
    seed = _shoot_fans_only("RP5", left, right, 0.7, 0.3, IDEAL_PAIR)
    _finish_fan_problem("RP5", seed, 0.3, left, right, IDEAL_PAIR)


def rp6():
    """Rarefaction plus shock in each phase.

    A first disjoint-pattern shot reveals that the phase-1 shock sits
    inside the phase-2 fan on the right, so the realizable pattern is
    a hosted interior shock there.  The far edge of the outermost fan
    must carry the characteristic speed of the data (lambda_{2+} = 2),
    which pins one parameter; the remaining seven are polished with a
    damped Gauss-Newton on central differences, keeping the best
    iterate (finite-difference Jacobians get noisy near the interior
    shock's branch selection).
    """
    from twophase.exact import shock_in_raref

    left = PrimitiveState(0.7, 2.0, 1.0, 0.0, 0.0)
    right = PrimitiveState(0.3, 1.0, 2.0, 0.0, 0.0)
    pair = IDEAL_PAIR
    t2p = family_from_key("2+").speed_of(right, pair)  # = 2.0 exactly

    def build(p7, validate=False):
        r1, r2, u1, u2, t1m, s2m, s1p = p7
        seed = PrimitiveState(0.7, r1, r2, u1, u2)
        return build_solution(
            seed,
            0.3,
            [raref("1-", t1m), shock("2-", s2m)],
            [shock_in_raref("2+", t2p, s1p)],
            pair,
            validate=validate,
        )

    def residual(p7):
        try:
            sol = build(p7)
        except Exception:
            return np.full(8, 1e3)
        return np.concatenate(
            [
                sol.left_state.as_array()[1:] - left.as_array()[1:],
                sol.right_state.as_array()[1:] - right.as_array()[1:],
            ]
        )

    x = np.array([1.5, 1.35, 0.35, -0.35, -1.4, -1.8, 1.6])
    sol = root(lambda p: residual(p)[:7], x, method="hybr", tol=1e-12)
    x = sol.x
    best = (np.max(np.abs(residual(x))), x.copy())
    for _ in range(25):
        f = residual(x)
        m = np.max(np.abs(f))
        if m < best[0]:
            best = (m, x.copy())
        if m < 2e-12:
            break
        J = np.zeros((8, 7))
        for j in range(7):
            h = 3e-8 * max(1.0, abs(x[j]))
            xp = x.copy()
            xp[j] += h
            xm = x.copy()
            xm[j] -= h
            J[:, j] = (residual(xp) - residual(xm)) / (2 * h)
        step, *_ = np.linalg.lstsq(J, -f, rcond=None)
        lam = 1.0
        while lam > 1e-4 and np.max(np.abs(residual(x + lam * step))) >= m:
            lam *= 0.5
        x = x + lam * step
    m, x = best
    print(f"RP6 max data residual: {m:.3e}")
    print("RP6 seed + speeds:", [repr(v) for v in x], " host tail:", t2p)
    built = build(x, validate=True)
    for el in built.elements:
        print("   ", el.label())


if __name__ == "__main__":
    rp3_targets()
    rp5()
    rp6()
