import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from ergoswarm_plots.cli import main
from ergoswarm_plots.figures import PlotSpec, plot_entropy, plot_space_time
from ergoswarm_plots.tables import read_aggregate, read_table, read_truth, strategy_labels


def parse_csv_floats(path: Path) -> dict[str, np.ndarray]:
    cols = read_table(path)
    out = {}
    for k, vs in cols.items():
        try:
            out[k] = np.array([float(v) for v in vs])
        except ValueError:
            pass  # non-numeric column (strategy/planner names)
    return out


def bundle_digests(bundle: Path) -> dict[str, str]:
    return {
        str(p.relative_to(bundle)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(bundle.rglob("*"))
        if p.is_file()
    }


class TestEntropyFigure:
    def test_cli_renders_and_dump_matches_aggregates(self, bundle, tmp_path):
        fig = tmp_path / "entropy.png"
        dump = tmp_path / "entropy_dump.csv"
        rc = main(["entropy", str(bundle), "-o", str(fig), "--dump", str(dump)])
        assert rc == 0
        assert fig.exists() and fig.stat().st_size > 0

        dumped = parse_csv_floats(dump)
        for label in strategy_labels(bundle):
            agg = read_aggregate(bundle, label)
            for metric in ("h_true", "h_est"):
                for q in ("median", "q1", "q3"):
                    col = f"{label}:{metric}_{q}"
                    assert col in dumped
                    assert np.array_equal(dumped[col], agg[f"{metric}_{q}"]), col

    def test_strategy_filter(self, bundle, tmp_path):
        fig = tmp_path / "one.png"
        dump = tmp_path / "one.csv"
        rc = main([
            "entropy", str(bundle), "-o", str(fig),
            "--strategies", "annealed", "--dump", str(dump),
        ])
        assert rc == 0
        dumped = parse_csv_floats(dump)
        assert any("annealed" in k for k in dumped)
        assert not any("direct" in k for k in dumped)

    def test_unknown_strategy_errors(self, bundle, tmp_path):
        rc = main([
            "entropy", str(bundle), "-o", str(tmp_path / "x.png"),
            "--strategies", "greedy",
        ])
        assert rc == 1

    def test_missing_bundle_errors(self, tmp_path):
        rc = main(["entropy", str(tmp_path / "nope"), "-o", str(tmp_path / "x.png")])
        assert rc == 1

    def test_constant_metric_zero_width_band(self, tmp_path):
        # synthetic single-strategy bundle with a constant metric
        b = tmp_path / "flat"
        (b / "uniform__metropolis_hastings").mkdir(parents=True)
        (b / "manifest.json").write_text(json.dumps({
            "complete": True,
            "strategies": ["uniform__metropolis_hastings"],
            "trial_seeds": [0],
            "files": {},
        }))
        header = "k,h_true_median,h_true_q1,h_true_q3,h_est_median,h_est_q1,h_est_q3,gap_median,gap_q1,gap_q3"
        rows = [f"{k},2,2,2,2,2,2,0,0,0" for k in range(5)]
        (b / "uniform__metropolis_hastings" / "aggregate.csv").write_text(
            header + "\n" + "\n".join(rows) + "\n"
        )
        dump = tmp_path / "flat.csv"
        rc = main(["entropy", str(b), "-o", str(tmp_path / "flat.png"), "--dump", str(dump)])
        assert rc == 0
        dumped = parse_csv_floats(dump)
        label = "uniform__metropolis_hastings"
        assert np.all(dumped[f"{label}:h_true_q1"] == dumped[f"{label}:h_true_q3"])
        assert np.all(dumped[f"{label}:h_true_median"] == 2.0)


class TestSpaceTimeFigure:
    def test_annealed_starts_uniform_ends_near_oracle(self, bundle, tmp_path):
        fig = tmp_path / "st.png"
        dump = tmp_path / "st.csv"
        rc = main([
            "space-time", str(bundle), "--trial", "0", "-o", str(fig), "--dump", str(dump),
        ])
        assert rc == 0
        assert fig.exists() and fig.stat().st_size > 0
        dumped = parse_csv_floats(dump)
        truth = read_truth(bundle, 0)
        optimal = truth["variance"] / truth["variance"].sum()
        n = len(optimal)
        start = np.array([dumped[f"rho_bar_{i}"][0] for i in range(n)])
        end = np.array([dumped[f"rho_bar_{i}"][-1] for i in range(n)])
        assert np.allclose(start, 1.0 / n, atol=1e-12)   # beta(0) = 0
        assert np.max(np.abs(end - optimal)) < 0.05      # cooled to the oracle
        for i in range(n):
            assert np.all(dumped[f"optimal_{i}"] == dumped[f"optimal_{i}"][0])

    def test_dump_matches_trial_table(self, bundle, tmp_path):
        dump = tmp_path / "st2.csv"
        rc = main([
            "space-time", str(bundle), "--trial", "1", "-o", str(tmp_path / "f.png"),
            "--strategy", "direct", "--dump", str(dump),
        ])
        assert rc == 0
        dumped = parse_csv_floats(dump)
        table = parse_csv_floats(bundle / "direct__metropolis_hastings" / "trial_0001.csv")
        n = sum(1 for k in table if k.startswith("rho_bar_"))
        for i in range(n):
            assert np.array_equal(dumped[f"rho_bar_{i}"], table[f"rho_bar_{i}"])
            assert np.array_equal(dumped[f"rho_hat_{i}"], table[f"rho_hat_{i}"])

    def test_uniform_strategy_target_is_flat(self, bundle, tmp_path):
        dump = tmp_path / "uni.csv"
        rc = main([
            "space-time", str(bundle), "-o", str(tmp_path / "u.png"),
            "--strategy", "uniform", "--dump", str(dump),
        ])
        assert rc == 0
        dumped = parse_csv_floats(dump)
        n = sum(1 for k in dumped if k.startswith("rho_bar_"))
        for i in range(n):
            assert np.all(dumped[f"rho_bar_{i}"] == dumped[f"rho_bar_{i}"][0])

    def test_single_region_pinned_at_one(self, single_region_bundle, tmp_path):
        dump = tmp_path / "single.csv"
        rc = main([
            "space-time", str(single_region_bundle), "-o", str(tmp_path / "s.png"),
            "--dump", str(dump),
        ])
        assert rc == 0
        dumped = parse_csv_floats(dump)
        assert np.all(dumped["rho_bar_0"] == 1.0)
        assert np.all(dumped["rho_hat_0"] == 1.0)

    def test_missing_trial_errors(self, bundle, tmp_path):
        rc = main([
            "space-time", str(bundle), "--trial", "99", "-o", str(tmp_path / "x.png"),
        ])
        assert rc == 1


class TestInvariants:
    def test_plotting_is_read_only(self, bundle, tmp_path):
        before = bundle_digests(bundle)
        main(["entropy", str(bundle), "-o", str(tmp_path / "a.png")])
        main(["space-time", str(bundle), "-o", str(tmp_path / "b.png")])
        assert bundle_digests(bundle) == before

    def test_identical_inputs_identical_dumps(self, bundle, tmp_path):
        d1, d2 = tmp_path / "d1.csv", tmp_path / "d2.csv"
        main(["entropy", str(bundle), "-o", str(tmp_path / "p1.png"), "--dump", str(d1)])
        main(["entropy", str(bundle), "-o", str(tmp_path / "p2.png"), "--dump", str(d2)])
        assert d1.read_bytes() == d2.read_bytes()

    def test_usage_error_exit_code(self):
        assert main(["entropy"]) == 1
        assert main([]) == 1


class TestApiSurface:
    def test_plot_spec_direct_use(self, bundle, tmp_path):
        spec = PlotSpec(
            bundle=bundle,
            kind="entropy-comparison",
            out=tmp_path / "api.png",
            strategies=("annealed", "uniform"),
        )
        path = plot_entropy(spec)
        assert path.exists()

    def test_space_time_direct_use(self, bundle, tmp_path):
        spec = PlotSpec(
            bundle=bundle,
            kind="space-time-average",
            out=tmp_path / "api2.png",
            strategies=("annealed",),
            trial=2,
        )
        path = plot_space_time(spec)
        assert path.exists()
