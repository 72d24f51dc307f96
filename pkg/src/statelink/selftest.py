"""Built-in oracle battery behind the `statelink selftest` CLI command.

Each check recomputes an expected result by an independent route (grid
quadrature, exhaustive enumeration, an information-form filter, brute-force
MAP) and compares the library against it.  This is a fast smoke battery;
the full suite lives in tests/.
"""

from __future__ import annotations

import numpy as np

from .channel import sigmoid
from .coding import RscCode, logmap_decode, rsc_encode
from .gaussian import GaussianBelief, affine_propagate, gaussian_product, std_normal_cdf
from .harness import ExperimentConfig, run_experiment
from .kalman import kf_predict, kf_update
from .quantize import (QuantizerSpec, bit_probability_moments, dequantize,
                       exact_bit_priors, mc_bit_priors, quantize_vector)
from .receivers import bp_combine_and_believe, bp_forward_pi, bp_lambda_y_to_x
from .statespace import StateSpaceModel, build_generator_model


def _check_gaussian_product():
    a = GaussianBelief([0.0], [[1.0]])
    b = GaussianBelief([2.0], [[1.0]])
    p = gaussian_product(a, b)
    if abs(p.mean[0] - 1.0) > 1e-12 or abs(p.cov[0, 0] - 0.5) > 1e-12:
        return False, f"scalar product gave N({p.mean[0]}, {p.cov[0,0]})"
    rng = np.random.default_rng(3)
    m1, m2 = rng.normal(size=2), rng.normal(size=2)
    c1 = np.array([[1.0, 0.3], [0.3, 0.8]])
    c2 = np.array([[0.6, -0.2], [-0.2, 1.2]])
    g = gaussian_product(GaussianBelief(m1, c1), GaussianBelief(m2, c2))
    xs = np.linspace(-8, 8, 401)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)

    def dens(m, c):
        d = pts - m
        sol = np.linalg.solve(c, d.T).T
        return np.exp(-0.5 * np.sum(d * sol, axis=1))

    w = dens(m1, c1) * dens(m2, c2)
    w /= w.sum()
    mean = pts.T @ w
    if np.max(np.abs(mean - g.mean)) > 1e-6:
        return False, f"grid mean {mean} vs product mean {g.mean}"
    return True, "product matches 2-D grid integration"


def _check_affine():
    g = GaussianBelief([1.0], [[1.0]])
    out = affine_propagate(g, [[2.0]], [[1.0]])
    ok = abs(out.mean[0] - 2.0) < 1e-12 and abs(out.cov[0, 0] - 5.0) < 1e-12
    return ok, f"scalar affine gave N({out.mean[0]}, {out.cov[0,0]})"


def _check_cdf():
    ok = (abs(std_normal_cdf(0.0) - 0.5) < 1e-15
          and abs(std_normal_cdf(1.0) - 0.8413447460685429) < 1e-12)
    return ok, "standard normal CDF values"


def _check_quantizer_roundtrip():
    spec = QuantizerSpec(12, 50.0)
    rng = np.random.default_rng(11)
    y = rng.uniform(-50, 50, size=(200, 3))
    worst = 0.0
    for row in y:
        err = np.max(np.abs(dequantize(quantize_vector(row, spec), spec) - row))
        worst = max(worst, err)
    return worst <= spec.step / 2 + 1e-12, f"worst roundtrip error {worst:.3g}"


def _check_moments_enumeration():
    spec = QuantizerSpec(6, 2.0)
    rng = np.random.default_rng(5)
    p = rng.uniform(0.05, 0.95, size=6)
    mean, var = bit_probability_moments(p, spec)
    idx = np.arange(64)
    bits = (idx[:, None] >> np.arange(5, -1, -1)) & 1
    cell_p = np.prod(np.where(bits == 1, p, 1 - p), axis=1)
    centers = -2.0 + (idx + 0.5) * spec.step
    mu = centers @ cell_p
    vr = (centers - mu) ** 2 @ cell_p
    ok = abs(mean[0] - mu) < 1e-12 and abs(var[0] - max(vr, spec.step**2 / 12)) < 1e-12
    return ok, "moment matching matches 64-cell enumeration"


def _check_mc_vs_exact_priors():
    spec = QuantizerSpec(4, 2.0)
    g = GaussianBelief([0.3], [[0.49]])
    exact = exact_bit_priors([(0.3, 0.49)], spec)
    ns = 20000
    mc = mc_bit_priors(g, spec, ns, rng=np.random.default_rng(7))
    bound = 4 * np.sqrt(exact * (1 - exact) / ns) + 1e-9
    ok = np.all(np.abs(mc - exact) <= bound)
    return ok, f"max MC deviation {np.max(np.abs(mc - exact)):.4f}"


def _scalar_model(a=0.9, q=0.05, r=0.05):
    return StateSpaceModel(A=[[a]], B=[[0.0]], C=[[1.0]],
                           proc_noise_cov=[[q]], obs_noise_cov=[[r]])


def _check_kf_information_filter():
    a, q, r = 0.9, 0.05, 0.05
    model = _scalar_model(a, q, r)
    rng = np.random.default_rng(2)
    ys = rng.normal(size=100)
    belief = GaussianBelief([0.0], [[10.0]])
    info_p, info_y = 0.1, 0.0          # precision / information vector
    worst = 0.0
    for t, y in enumerate(ys):
        if t > 0:
            belief = kf_predict(belief, model)
            mean, var = info_y / info_p, 1.0 / info_p
            mean, var = a * mean, a * a * var + q
            info_p, info_y = 1.0 / var, mean / var
        belief = kf_update(belief, [y], model)
        info_p += 1.0 / r
        info_y += y / r
        worst = max(worst, abs(belief.mean[0] - info_y / info_p),
                    abs(belief.cov[0, 0] - 1.0 / info_p))
    return worst < 1e-9, f"max deviation from information filter {worst:.2e}"


def _check_riccati():
    model = build_generator_model(0.01, 0.05, 0.05)
    belief = GaussianBelief(np.zeros(7), 10.0 * np.eye(7))
    prev = belief.cov
    for step in range(500):
        belief = kf_update(kf_predict(belief, model), np.zeros(7), model)
        delta = np.max(np.abs(belief.cov - prev))
        prev = belief.cov
        if delta < 1e-9:
            return True, f"posterior covariance converged in {step + 1} steps"
    return False, "no Riccati convergence within 500 steps"


def _check_logmap_exhaustive():
    code = RscCode()
    k = 8
    rng = np.random.default_rng(9)
    ch = rng.normal(scale=2.0, size=code.coded_length(k))
    prior = rng.normal(scale=0.5, size=k)
    post, _ = logmap_decode(ch, prior, code)
    scores = np.empty(2**k)
    words = np.empty((2**k, k), dtype=np.uint8)
    for w in range(2**k):
        info = (w >> np.arange(k)[::-1]) & 1
        words[w] = info
        cw = rsc_encode(info, code)
        scores[w] = cw @ ch + info @ prior
    scores -= scores.max()
    probs = np.exp(scores)
    p1 = words.T @ probs / probs.sum()
    worst = np.max(np.abs(sigmoid(post) - p1))
    return worst < 1e-6, f"max posterior deviation from exhaustive MAP {worst:.2e}"


def _check_bp_reduces_to_kf():
    model = _scalar_model()
    belief = GaussianBelief([0.0], [[10.0]])
    pi = belief
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(50):
        y = rng.normal()
        kf_post = kf_update(kf_predict(belief, model), [y], model)
        pi_local, pi_to_y = bp_forward_pi(pi, model)
        lam = bp_lambda_y_to_x([y], [0.0], model)
        pi_out, bel = bp_combine_and_believe(pi_local, lam, None)
        worst = max(worst, abs(bel.mean[0] - kf_post.mean[0]),
                    abs(bel.cov[0, 0] - kf_post.cov[0, 0]))
        belief, pi = kf_post, pi_out
    return worst < 1e-9, f"max BP/KF deviation {worst:.2e}"


def _check_noiseless_end_to_end():
    cfg = ExperimentConfig(slots=40, trials=1, ebn0_grid_db=(60.0,),
                           quantizer_bits=8, master_seed=1)
    report = run_experiment(cfg)
    bers = [c.ber for c in report.cells]
    ok = all(b == 0.0 for b in bers)
    return ok, f"noiseless BERs {bers}"


CHECKS = [
    ("gaussian-product", _check_gaussian_product),
    ("affine-propagate", _check_affine),
    ("std-normal-cdf", _check_cdf),
    ("quantizer-roundtrip", _check_quantizer_roundtrip),
    ("moment-matching", _check_moments_enumeration),
    ("mc-vs-exact-priors", _check_mc_vs_exact_priors),
    ("kf-vs-information-filter", _check_kf_information_filter),
    ("riccati-convergence", _check_riccati),
    ("logmap-vs-exhaustive-map", _check_logmap_exhaustive),
    ("bp-reduces-to-kf", _check_bp_reduces_to_kf),
    ("noiseless-end-to-end", _check_noiseless_end_to_end),
]


def run_selftest(out=print) -> bool:
    all_ok = True
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        out(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return all_ok
