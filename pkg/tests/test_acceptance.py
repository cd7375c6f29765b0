"""Acceptance suite: one test per release criterion, one PASS line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. The empirical criteria use the desk-scale benchmark from conftest:
2,000 separable synthetic rows, separation 6.0, seed 42.
"""

import numpy as np
import pytest

from advflow import experiment, nn
from advflow.attack import AttackConfig, fgsm_perturb
from advflow.cli import main
from advflow.data import Dataset, SmoteConfig, smote_balance, synthetic_schema
from advflow.linalg import Rng
from advflow.metrics import ConfusionMatrix, f1, precision, recall


def _ok(num, text):
    print(f"ACCEPTANCE {num}: PASS - {text}")


def test_criterion_1_metric_formula_fidelity():
    """Published count tables reproduce the published percentages to 0.01."""
    rows = [
        (ConfusionMatrix(tp=41, tn=879_400, fp=935, fn=70), 4.20, 36.94, 7.54),
        (ConfusionMatrix(tp=879_760, tn=875_348, fp=4_987, fn=574),
         99.44, 99.93, 99.68),
        (ConfusionMatrix(tp=0, tn=203, fp=3_963, fn=5_243), 0.0, 0.0, 0.0),
    ]
    for cm, p, r, f in rows:
        assert precision(cm) == pytest.approx(p, abs=0.01)
        assert recall(cm) == pytest.approx(r, abs=0.01)
        assert f1(cm) == pytest.approx(f, abs=0.01)
    _ok(1, "metric formulas reproduce published tables within 0.01 points")


def test_criterion_2_fgsm_correctness():
    """Exact L-inf bound, exact eps=0 identity, loss ascent on a toy model."""
    rng = Rng(202)
    checked = 0
    for _ in range(20):
        dims = [int(rng.integers(2, 7)), int(rng.integers(2, 7)), 2]
        model = nn.build_model(dims, rng)
        x = rng.uniform(0, 1, (50, dims[0]))
        y = (rng.uniform(size=50) > 0.5).astype(int)
        for _ in range(1):
            eps = float(rng.uniform(0, 1.2))
            adv = fgsm_perturb(model, x, y, AttackConfig(epsilon=eps))
            assert (np.abs(adv - x) <= eps).all()
            checked += 50
        adv0 = fgsm_perturb(model, x, y, AttackConfig(epsilon=0.0))
        assert np.array_equal(adv0, x)
    assert checked == 1000

    # trained toy model: the single-step attack ascends the loss
    from advflow.data import generate_synthetic, minmax_normalize

    raw = generate_synthetic(synthetic_schema(4), 250, 250, 6.0, Rng(203))
    ds, _, _ = minmax_normalize(raw)
    model, _ = nn.train(
        nn.build_paper_model(4, Rng(204)), ds,
        nn.TrainConfig(epochs=40, batch_size=32, learning_rate=0.1), Rng(205),
    )
    adv = fgsm_perturb(model, ds.features, ds.labels, AttackConfig(epsilon=0.1))

    def per_sample(xv):
        p = np.clip(nn.forward(model, xv), 1e-12, 1 - 1e-12)
        t = np.zeros_like(p)
        t[np.arange(len(xv)), ds.labels] = 1.0
        return -(t * np.log(p) + (1 - t) * np.log(1 - p)).sum(axis=1)

    frac = (per_sample(adv) >= per_sample(ds.features)).mean()
    assert frac >= 0.95
    _ok(2, f"L-inf bound exact on 1000 triples; loss ascended for {frac:.1%}")


def test_criterion_3_gradient_check():
    """Backprop matches central differences on 20 random small networks."""
    h = 1e-5

    def close(analytic, numeric):
        tol = np.maximum(1e-4 * np.abs(numeric), 1e-7)
        return (np.abs(analytic - numeric) <= tol).all()

    for seed in range(20):
        rng = Rng(3000 + seed)
        n_hidden = int(rng.integers(0, 3))
        dims = [int(rng.integers(2, 9))] + \
               [int(rng.integers(2, 9)) for _ in range(n_hidden)] + [2]
        model = nn.build_model(dims, rng)
        x = rng.uniform(-1, 1, (3, dims[0]))
        y = (rng.uniform(size=3) > 0.5).astype(int)
        d_w, d_b, d_x = nn.gradients(model, x, y)

        num_x = np.zeros_like(x)
        for i in range(x.shape[0]):
            for j in range(x.shape[1]):
                xp, xm = x.copy(), x.copy()
                xp[i, j] += h
                xm[i, j] -= h
                num_x[i, j] = (nn.loss(model, xp, y) - nn.loss(model, xm, y)) / (2 * h)
        assert close(d_x, num_x)

        for layer in range(len(model.weights)):
            w = model.weights[layer]
            num_w = np.zeros_like(w)
            for i in range(w.shape[0]):
                for j in range(w.shape[1]):
                    orig = w[i, j]
                    w[i, j] = orig + h
                    lp = nn.loss(model, x, y)
                    w[i, j] = orig - h
                    lm = nn.loss(model, x, y)
                    w[i, j] = orig
                    num_w[i, j] = (lp - lm) / (2 * h)
            assert close(d_w[layer], num_w)
    _ok(3, "input and weight gradients match finite differences on 20 nets")


def test_criterion_4_smote_properties():
    """37-vs-2,934 imbalance: exact balance, every synthetic row on a true
    nearest-neighbor segment."""
    rng = Rng(404)
    n_min, n_maj = 37, 2_934
    features = np.vstack([
        rng.normal(3.0, 1.0, (n_min, 5)),
        rng.normal(0.0, 1.0, (n_maj, 5)),
    ])
    labels = np.array([1] * n_min + [0] * n_maj)
    ds = Dataset(schema=synthetic_schema(5), features=features, labels=labels)
    k = 5
    out = smote_balance(ds, SmoteConfig(k_neighbors=k), Rng(405))

    assert (out.labels == 0).sum() == n_maj
    assert (out.labels == 1).sum() == n_maj
    assert np.array_equal(out.features[: len(ds.features)], ds.features)

    minority = features[:n_min]
    segments = []
    for i in range(n_min):
        d = np.linalg.norm(minority - minority[i], axis=1)
        d[i] = np.inf
        for j in np.argsort(d)[:k]:
            segments.append((minority[i], minority[j]))
    synth = out.features[len(ds.features):]
    for v in synth:
        hit = False
        for s, n in segments:
            d = n - s
            u = float((v - s) @ d) / float(d @ d)
            if -1e-9 <= u <= 1 + 1e-9 and np.linalg.norm(v - (s + u * d)) < 1e-9:
                hit = True
                break
        assert hit
    _ok(4, f"classes balanced to {n_maj} each; all {len(synth)} synthetic rows "
           "pass the brute-force segment oracle")


def test_criterion_5_degradation_curve(bench_cfg, bench_ctx):
    """Accuracy is non-increasing in epsilon (<=1 point slack per step) and
    collapses by at least 30 points over the sweep."""
    report = experiment.run_sweep(bench_cfg, bench_ctx)
    eps_rows = report.blocks[0].rows[1:]
    accs = [r.accuracy for r in eps_rows]
    for prev, cur in zip(accs, accs[1:]):
        assert cur <= prev + 1.0
    assert accs[0] - accs[-1] >= 30.0
    _ok(5, f"accuracy fell {accs[0]:.2f} -> {accs[-1]:.2f} across the sweep, "
           "monotone within 1 point per step")


def test_criterion_6_defense_efficacy(bench_ctx):
    """Retraining with a 20% adversarial mix recovers >=20 F1 points on the
    fully adversarial test set; F1 non-decreasing in the mix fraction."""
    f1s = []
    for frac in (0.0, 0.1, 0.2):
        dcfg = experiment.DefenseConfig(adversarial_fraction=frac,
                                        attack_epsilon=1.0, seed=bench_ctx.seed)
        f1s.append(experiment.run_defense(dcfg, bench_ctx).f1)
    assert f1s[2] >= f1s[0] + 20.0
    for prev, cur in zip(f1s, f1s[1:]):
        assert cur >= prev - 2.0
    _ok(6, "adversarial-test F1 " +
           " -> ".join(f"{v:.2f}" for v in f1s) + " across mixes 0/10%/20%")


def test_criterion_7_cli_determinism(tmp_path):
    """Two full CLI runs with identical manifests produce byte-identical
    report files."""
    flags = ["sweep", "--synthetic", "--n-normal", "1000", "--n-attack", "1000",
             "--separation", "6.0", "--seed", "42", "--epochs", "60",
             "--batch-size", "64", "--lr", "0.1"]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main([*flags, "--out", str(out_a)]) == 0
    assert main([*flags, "--out", str(out_b)]) == 0
    for name in ("report.json", "report.txt", "accuracy_vs_epsilon.csv",
                 "model.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    _ok(7, "repeated CLI sweep runs are byte-identical")


def test_criterion_8_epsilon_zero_equivalence(bench_cfg, bench_ctx):
    """The eps=0 sweep row equals the clean row exactly."""
    report = experiment.run_sweep(bench_cfg, bench_ctx)
    clean, eps0 = report.blocks[0].rows[0], report.blocks[0].rows[1]
    assert eps0.cm == clean.cm
    assert eps0.precision == clean.precision
    assert eps0.recall == clean.recall
    assert eps0.f1 == clean.f1
    assert eps0.accuracy == clean.accuracy
    _ok(8, "eps=0 row identical to the clean evaluation")
