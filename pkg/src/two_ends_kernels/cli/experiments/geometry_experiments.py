"""Volume growth experiment."""

import logging

from two_ends_kernels.cli.context import RunContext
from two_ends_kernels.geometry.model_geometry import volume_growth_report
from two_ends_kernels.geometry.serialization import save_model
from two_ends_kernels.schemas.experiment_schemas import VolumeParams

logger = logging.getLogger(__name__)


def run_volume(context: RunContext) -> None:
    """Fit the three volume regimes and record the doubling sweep."""
    params: VolumeParams = context.config.experiment
    report = volume_growth_report(context.model)
    context.writer.write_json("volume_report.json", report)
    context.writer.write_csv(
        "volume_fits.csv",
        ["regime", "expected_slope", "slope", "intercept", "r_min", "r_max", "n_radii"],
        [
            (fit.regime, fit.expected_slope, fit.slope, fit.intercept)
            + (fit.r_min, fit.r_max, fit.n_radii)
            for fit in report.regimes
        ],
    )
    context.writer.write_csv(
        "doubling_sweep.csv",
        ["r", "ratio"],
        zip(report.doubling_radii, report.doubling_ratios, strict=True),
    )
    if params.dump_model:
        context.writer.register(save_model(context.model, context.writer.path("model.txt")))

    for fit in report.regimes:
        context.note(f"{fit.regime}: slope {fit.slope:.4f} (expected {fit.expected_slope})")
        context.check_at_most(f"slope_{fit.regime}", fit.relative_error, params.slope_tolerance)
    context.note(f"largest doubling ratio on the small end: {report.max_doubling_ratio:.3f}")

    context.writer.write_csv(
        "doubling_witness.csv",
        ["abs_x", "ratio"],
        zip(report.witness_abs, report.witness_ratios, strict=True),
    )
    context.note(
        "witness V(x, 2|x|) / V(x, |x|): "
        + ", ".join(
            f"{ratio:.3f} at |x| = {abs_x:.2f}"
            for abs_x, ratio in zip(report.witness_abs, report.witness_ratios, strict=True)
        )
    )
    context.check("doubling_witness_grows", report.witness_grows)
