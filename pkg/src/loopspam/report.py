"""End-to-end scenario execution and report serialization."""

import csv
import io
import json
import math
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .measurement import observable_from_setting
from .simulator import pooled_counts, run_trials
from .spamloop import delta_statistics, trial_deltas, verdict
from .states import rho_werner
from .tomography import TomographyInput, characterize, reconstruct

TIMESTAMP_KEY = "generated_at"


def run_scenario(config, workers=None):
    """Simulate the configured experiment and assemble the report dict."""
    state = rho_werner(config.state)
    plan = config.plan
    trials = run_trials(state, plan, config.policy, workers=workers or config.workers)
    deltas, skipped = trial_deltas(trials.grids)
    stats = delta_statistics(deltas, skipped)
    result = verdict(stats, config.threshold)
    chsh = np.array(trials.chsh_values)

    report = {
        "software": {"name": "loopspam", "version": __version__},
        TIMESTAMP_KEY: datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "seed": plan.seed,
        "config": config.echo(),
        "chsh": {
            "values": chsh.tolist(),
            "mean": float(chsh.mean()),
            "std": float(chsh.std(ddof=1)),
        },
        "delta": stats.as_dict(),
        "verdict": result.as_dict(),
    }
    if config.tomography:
        data = TomographyInput(
            alice_obs=tuple(observable_from_setting(s) for s in plan.alice),
            bob_obs=tuple(observable_from_setting(s) for s in plan.bob),
            counts=pooled_counts(trials),
        )
        rec = reconstruct(data)
        block = characterize(rec.physical, chsh_measured=float(chsh.mean())).as_dict()
        block["clip_magnitude"] = rec.clip_magnitude
        report["characterization"] = block
    return report


def _sanitize(obj):
    """Replace non-finite floats by the strings 'inf', '-inf' or 'nan'."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def to_json(report):
    # repr-based float output round-trips exactly
    return json.dumps(_sanitize(report), indent=2, allow_nan=False) + "\n"


def strip_timestamp(text):
    data = json.loads(text)
    data.pop(TIMESTAMP_KEY, None)
    return json.dumps(data, sort_keys=True)


def delta_csv(report):
    """Per-entry mean/std/ratio rows, ready for bar charts."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "mean", "std", "ratio"])
    d = _sanitize(report["delta"])
    for i in range(3):
        for j in range(3):
            w.writerow([i, j, repr_float(d["mean"][i][j]), repr_float(d["std"][i][j]),
                        repr_float(d["ratio"][i][j])])
    return buf.getvalue()


def repr_float(x):
    return repr(float(x)) if isinstance(x, (int, float)) else x


def summary_table(report):
    """Human-readable summary of a run report."""
    c = report["chsh"]
    v = report["verdict"]
    d = report["delta"]
    lines = [
        f"CHSH S = {c['mean']:.4f} +/- {c['std']:.4f}  ({len(c['values'])} trials)",
        f"trials used for Delta: {d['trials_used']} (excluded {d['trials_excluded']})",
        "",
        "|mean| / std of Delta - I:",
    ]
    ratio = np.array(_sanitize(d["ratio"]), dtype=object)
    for row in ratio:
        lines.append("  " + "  ".join(f"{x:>9.3f}" if isinstance(x, float) else f"{x:>9}"
                                      for x in row))
    lines.append("")
    status = "DETECTED" if v["detected"] else "not detected"
    lines.append(f"false correlations: {status} (max ratio {v['max_ratio']:.3f}, "
                 f"threshold {v['threshold']:g})")
    if "characterization" in report:
        lines.append("")
        lines.append(characterization_table(report["characterization"]))
    return "\n".join(lines)


def characterization_table(block):
    fit = block["werner_fit"]
    lines = [
        f"purity Tr(rho^2)   {block['purity']:.4f}",
        f"fit p_s, p_w       {fit['p_s']:.4f}, {fit['p_w']:.4f}"
        + ("  (p_s unidentifiable)" if fit["degenerate"] else ""),
        f"fit fidelity F     {fit['fidelity']:.4f}",
        f"Horodecki M        {block['m_param']:.4f}",
        f"S_max = 2 sqrt(M)  {block['s_max']:.4f}",
        f"negativity N       {block['negativity']:.4f}",
        f"CHSH capable       {block['chsh_capable']}",
    ]
    if block.get("chsh_measured") is not None:
        lines.append(f"bound S/sqrt2 - 1  {block['negativity_bound']:.4f} "
                     f"(S = {block['chsh_measured']:.4f})")
    return "\n".join(lines)
