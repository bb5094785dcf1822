"""Theorem-verification drivers: integral laws, uniform convergence, null sets,
cross-integral equivalences.  Every function returns a plain dict of
measured residuals against the bounds they must respect, with a ``passed``
flag; nothing here raises on a failed property.
"""

from __future__ import annotations

import numpy as np

from . import integrators as itg
from .convergence import NetSample, order_limsup_liminf
from .errors import ContractViolation
from .integrands import as_integrand
from .measures import NONNEGATIVE
from .partitions import TagPolicy, dyadic_chain, dyadic_countable_partition, null_extended_chain

SLACK = 1e-12


def _comp(rep_a, rep_b, extra=0.0):
    """Residual |a - b| against the summed certified bounds plus ``extra``."""
    resid = np.abs(rep_a.value.coords - rep_b.value.coords)
    bound = rep_a.cauchy_bound.coords + rep_b.cauchy_bound.coords + extra + SLACK
    return {
        "residual": float(resid.max()),
        "bound": float(bound.max()),
        "passed": bool(np.all(resid <= bound)),
    }


def _default_integrator(mu, level=12):
    chain = dyadic_chain(mu.space.omega, 0, level) if not mu.space.is_finite else None
    return lambda h: itg.net_riemann_integral(h, mu, chain=chain)


def verify_integral_laws(f, g, mu, integrator=None, chain=None, policy=None, tolerance=SLACK):
    """Additivity, positivity, isotonicity and the triangle inequality.

    Per step of ``chain`` the Riemann sums are compared exactly (additivity
    within ``tolerance`` per cell); the integrals are compared within their
    certified bounds.  Isotonicity uses the pair f <= f + |g|.  The order
    laws (positivity, isotonicity, triangle) need a nonnegative measure and
    are reported with ``applies`` False otherwise.
    """
    f, g = as_integrand(f), as_integrand(g)
    integrator = integrator or _default_integrator(mu)
    policy = policy or TagPolicy("midpoint")
    if chain is None:
        chain = dyadic_chain(mu.space.omega, 0, 12) if not mu.space.is_finite else itg.default_chain(mu.space.omega)
    nonneg = mu.has(NONNEGATIVE)
    upper = f + abs(g)
    step = {"additivity": True, "positivity": True, "isotonicity": True, "triangle": True}
    worst_add = 0.0
    for k in chain.levels:
        P = chain.partition(k, policy)
        sf, sg, sfg = (itg.riemann_sum(h, mu, P).coords for h in (f, g, f + g))
        s_abs = itg.riemann_sum(abs(f), mu, P).coords
        s_up = itg.riemann_sum(upper, mu, P).coords
        r = float(np.max(np.abs(sfg - sf - sg)))
        worst_add = max(worst_add, r)
        step["additivity"] &= r <= tolerance * max(len(P), 1)
        if nonneg:
            step["positivity"] &= bool(np.all(s_abs >= 0))
            step["isotonicity"] &= bool(np.all(sf <= s_up))
            step["triangle"] &= bool(np.all(np.abs(sf) <= s_abs))

    I = {name: integrator(h) for name, h in (("f", f), ("g", g), ("f+g", f + g), ("|f|", abs(f)), ("f+|g|", upper))}
    sum_fg = I["f"].value.coords + I["g"].value.coords
    add_resid = np.abs(I["f+g"].value.coords - sum_fg)
    add_bound = I["f+g"].cauchy_bound.coords + I["f"].cauchy_bound.coords + I["g"].cauchy_bound.coords + SLACK
    add = {"residual": float(add_resid.max()), "bound": float(add_bound.max()), "passed": bool(np.all(add_resid <= add_bound))}

    b_abs = I["|f|"].cauchy_bound.coords
    pos_ok = (not nonneg) or bool(np.all(I["|f|"].value.coords >= -b_abs))
    iso_gap = I["f"].value.coords - I["f+|g|"].value.coords
    iso_bound = I["f"].cauchy_bound.coords + I["f+|g|"].cauchy_bound.coords + SLACK
    iso_ok = (not nonneg) or bool(np.all(iso_gap <= iso_bound))
    tri_gap = np.abs(I["f"].value.coords) - I["|f|"].value.coords
    tri_bound = I["f"].cauchy_bound.coords + b_abs + SLACK
    tri_ok = (not nonneg) or bool(np.all(tri_gap <= tri_bound))

    props = {
        "additivity": dict(add, step_exact=step["additivity"], step_worst=worst_add),
        "positivity": {"passed": pos_ok and step["positivity"], "step_exact": step["positivity"], "applies": nonneg},
        "isotonicity": {
            "passed": iso_ok and step["isotonicity"],
            "applies": nonneg,
            "step_exact": step["isotonicity"],
            "residual": float(iso_gap.max()),
            "bound": float(iso_bound.max()),
        },
        "triangle": {
            "passed": tri_ok and step["triangle"],
            "applies": nonneg,
            "step_exact": step["triangle"],
            "residual": float(tri_gap.max()),
            "bound": float(tri_bound.max()),
        },
    }
    props["additivity"]["passed"] = props["additivity"]["passed"] and step["additivity"]
    return {"properties": props, "passed": all(p["passed"] for p in props.values())}


def _check_envelope(fn, f, un, x):
    fx = f.values(x)
    diff = np.abs(fn.values(x) - fx)
    slack = 4 * np.spacing(np.abs(fx) + un[None, :])
    return float(diff.max(initial=0.0)), bool(np.all(diff <= un[None, :] + slack))


def verify_uniform_convergence(f_seq, f, u, mu, integrator=None, null_set=None, n_max=20, samples=512, seed=0, level=12):
    """|int f_n - int f| <= u_n mu(Omega \\ N) + combined bounds for n <= n_max.

    Raises ContractViolation when the sampled envelope |f_n - f| <= u_n
    fails off ``null_set``.  With a null set the default integrator walks a
    chain of Omega \\ N extended by the null cell.
    """
    f = as_integrand(f)
    omega = mu.space.omega
    if integrator is None:
        if null_set is None:
            integrator = _default_integrator(mu, level)
        else:
            chain = dyadic_chain(omega - null_set, 0, level)
            for comp in null_set.components():
                chain = null_extended_chain(chain, type(null_set).interval(*comp))
            integrator = lambda h: itg.net_riemann_integral(h, mu, chain=chain)
    rest = omega if null_set is None else omega - null_set
    mass = np.abs(mu.evaluate(rest).coords)
    x = itg._envelope_samples(mu.space, null_set, samples, seed)
    base = integrator(f)
    rows, values, worst_bound = [], [], 0.0
    ok = True
    for n in range(1, n_max + 1):
        fn = as_integrand(f_seq(n))
        un = u(n)
        env, env_ok = _check_envelope(fn, f, un, x)
        if not env_ok:
            raise ContractViolation(
                f"sampled |f_n - f| = {env:.3g} exceeds u_{n}", module="laws", operation="verify_uniform_convergence"
            )
        rn = integrator(fn)
        c = _comp(rn, base, un * mass)
        rows.append({"n": n, **c})
        ok &= c["passed"]
        values.append(rn.value)
        worst_bound = max(worst_bound, float(rn.cauchy_bound.coords.max()))
    net = NetSample.from_values(values)
    sup, inf, _ = order_limsup_liminf(net, tail_start=max(n_max - 2, 0))
    gap = float(np.max(sup.coords - inf.coords))
    gap_bound = float(np.max(u(n_max) * mass)) + 2 * worst_bound + SLACK
    gap_ok = gap <= gap_bound
    return {
        "rows": rows,
        "gap": gap,
        "gap_bound": gap_bound,
        "passed": bool(ok and gap_ok),
        "limit": base.value.tolist(),
    }


def verify_null_sets(f, mu, N, chain_level=12, tol=1e-5):
    """S*-integral over N is exactly 0, Omega and Omega \\ N agree, and a chain
    of Omega \\ N extended by the null cells matches a chain of Omega."""
    f = as_integrand(f)
    omega = mu.space.omega
    if not mu.evaluate(N).is_zero():
        raise ContractViolation("N is not null", module="laws", operation="verify_null_sets")
    on_null = itg.s_star_partition_integral(f, mu, A=N, tol=tol)
    zero_ok = on_null.value.is_zero()
    whole = itg.s_star_partition_integral(f, mu, tol=tol)
    rest = itg.s_star_partition_integral(f, mu, A=omega - N, tol=tol)
    split = _comp(whole, rest)

    chain = dyadic_chain(omega - N, 0, chain_level)
    for comp in N.components():
        chain = null_extended_chain(chain, type(N).interval(*comp))
    nested = chain.check_nested()
    extended = itg.net_riemann_integral(f, mu, chain=chain)
    plain = itg.net_riemann_integral(f, mu, chain=dyadic_chain(omega, 0, chain_level))
    ext = dict(_comp(extended, plain), nested=nested)
    ext["passed"] = ext["passed"] and nested
    props = {
        "null_integral_zero": {"passed": zero_ok, "value": on_null.value.tolist()},
        "omega_vs_complement": split,
        "chain_extension": ext,
    }
    return {"properties": props, "passed": all(p["passed"] for p in props.values())}


def pavlakos_vs_s_star(f, mu, approx=None, u=None, tol=1e-5):
    """Pavlakos value (elementary, or via an approximating family) against S*."""
    f = as_integrand(f)
    if approx is None:
        pav = itg.pavlakos_elementary_integral(f, mu)
    else:
        pav = itg.pavlakos_integral(f, approx, u, mu)
    s = itg.s_star_partition_integral(f, mu, tol=tol)
    c = _comp(pav, s)
    c["pavlakos"] = pav.value.tolist()
    c["s_star"] = s.value.tolist()
    c["within_target"] = bool(c["bound"] <= tol + 2 * 2.0**-20 or c["residual"] <= tol)
    return c


def s_star_vs_sion(f, mu, tol=1e-5):
    f = as_integrand(f)
    a = itg.s_star_partition_integral(f, mu, tol=tol)
    b = itg.sion_integral(f, mu, tol=tol)
    c = _comp(a, b)
    c["certified"] = a.certified and b.certified
    c["diverged"] = itg.IntegralVerdict.DIVERGED in (a.verdict, b.verdict)
    c["passed"] = c["passed"] and not c["diverged"]
    return c


def choquet_vs_net_riemann(f, mu):
    """Choquet with the additive capacity C = mu against the Net Riemann integral."""
    from .measures import Capacity

    ch = itg.choquet_integral(f, Capacity(mu))
    nr = itg.net_riemann_integral(as_integrand(f), mu)
    return _comp(ch, nr)


def nu_sigma_additivity(f, mu, depth=8, level=12):
    """nu(A) = int_A f dmu is sigma-additive on a dyadic countable partition.

    Compares nu(Omega) with the sum over the first ``depth`` cells plus the
    remainder bound sup|f| * mu-mass of the unlisted cells.
    """
    f = as_integrand(f)
    omega = mu.space.omega
    stream = dyadic_countable_partition(omega)
    cells = stream.enumerate_sets(depth)
    parts = [itg.net_riemann_integral(f, mu, A=c, chain=dyadic_chain(c, 0, level)) for c in cells]
    total = itg.net_riemann_integral(f, mu, chain=dyadic_chain(omega, 0, level))
    s = np.sum([p.value.coords for p in parts], axis=0)
    b = np.sum([p.cauchy_bound.coords for p in parts], axis=0)
    tail_mass = mu.tail_from_length(stream.tail_length(depth))
    tail = f.sup_bound(omega) * tail_mass
    resid = np.abs(total.value.coords - s)
    bound = total.cauchy_bound.coords + b + tail + SLACK
    return {
        "residual": float(resid.max()),
        "bound": float(bound.max()),
        "tail": float(tail.max()),
        "passed": bool(np.all(resid <= bound)),
    }
