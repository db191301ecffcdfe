//! Matplotlib scripts, one per figure. Each reads only CSVs that sit next
//! to it, so the simulator itself never needs a plotting backend.

use crate::experiment::Artifact;

struct Figure {
    script: &'static str,
    /// File the figure needs; a trailing `*` matches a prefix.
    input: &'static str,
    body: &'static str,
}

const HEADER: &str = "\
import csv
import glob
import os

import matplotlib

matplotlib.use(\"Agg\")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def read(name):
    with open(os.path.join(HERE, name), newline=\"\") as f:
        rows = list(csv.DictReader(f))
    return {k: [float(r[k]) if k != \"state\" else r[k] for r in rows] for k in rows[0]}

";

const FIGURES: &[Figure] = &[
    Figure {
        script: "plot_traces.py",
        input: "trace_v*",
        body: "\
fig, axes = plt.subplots(3, 1, sharex=True, figsize=(7, 6))
for path in sorted(glob.glob(os.path.join(HERE, \"trace_v*.csv\"))):
    d = read(os.path.basename(path))
    label = os.path.basename(path)[len(\"trace_v\"):-len(\".csv\")] + \" V\"
    t = [x * 1e9 for x in d[\"t_s\"]]
    for ax, key in zip(axes, (\"m_x\", \"m_y\", \"m_z\")):
        ax.plot(t, d[key], lw=0.6, label=label)
        ax.set_ylabel(key)
axes[0].legend(loc=\"upper right\")
axes[-1].set_xlabel(\"t (ns)\")
fig.tight_layout()
fig.savefig(os.path.join(HERE, \"traces.png\"), dpi=150)
",
    },
    Figure {
        script: "plot_sweep.py",
        input: "sweep.csv",
        body: "\
d = read(\"sweep.csv\")
fig, ax = plt.subplots()
ax.plot(d[\"v_in\"], d[\"mean_mx\"], \"o-\")
ax.axhline(0.0, color=\"0.7\", lw=0.8)
ax.set_xlabel(\"V_in (V)\")
ax.set_ylabel(\"<m_x>\")
fig.tight_layout()
fig.savefig(os.path.join(HERE, \"sweep.png\"), dpi=150)
",
    },
    Figure {
        script: "plot_transfer.py",
        input: "transfer_curve.csv",
        body: "\
d = read(\"transfer_curve.csv\")
m = read(\"adc_metrics.csv\")
slope, intercept = m[\"slope\"][0], m[\"intercept\"][0]
fig, (ax, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
ax.plot(d[\"v_in\"], d[\"c_out\"], \"o\", label=\"C_out\")
ax.plot(d[\"v_in\"], [slope * v + intercept for v in d[\"v_in\"]], \"-\", label=\"fit\")
ax.set_ylabel(\"count\")
ax.set_title(\"NRMSD = %.2f %%\" % m[\"nrmsd_percent\"][0])
ax.legend()
ax2.step(d[\"v_in\"], d[\"code\"], where=\"mid\")
ax2.set_xlabel(\"V_in (V)\")
ax2.set_ylabel(\"code\")
fig.tight_layout()
fig.savefig(os.path.join(HERE, \"transfer_curve.png\"), dpi=150)
",
    },
    Figure {
        script: "plot_dwells.py",
        input: "dwells.csv",
        body: "\
d = read(\"dwells.csv\")
fig, ax = plt.subplots()
for state in (\"up\", \"down\"):
    xs = [t * 1e9 for s, t in zip(d[\"state\"], d[\"dwell_s\"]) if s == state]
    if xs:
        ax.hist(xs, bins=40, alpha=0.6, label=state)
ax.set_xlabel(\"dwell (ns)\")
ax.set_ylabel(\"count\")
ax.set_yscale(\"log\")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(HERE, \"dwells.png\"), dpi=150)
",
    },
    Figure {
        script: "plot_arrhenius.py",
        input: "arrhenius.csv",
        body: "\
d = read(\"arrhenius.csv\")
fig, ax = plt.subplots()
ax.semilogy(d[\"e_b_over_kt\"], [t * 1e9 for t in d[\"mean_dwell_s\"]], \"o-\")
ax.set_xlabel(\"E_B / kT\")
ax.set_ylabel(\"mean dwell (ns)\")
fig.tight_layout()
fig.savefig(os.path.join(HERE, \"arrhenius.png\"), dpi=150)
",
    },
    Figure {
        script: "plot_switching.py",
        input: "switching.csv",
        body: "\
d = read(\"switching.csv\")
p = d[\"p_switch\"]
err = [[pi - lo for pi, lo in zip(p, d[\"ci_lo\"])], [hi - pi for pi, hi in zip(p, d[\"ci_hi\"])]]
fig, ax = plt.subplots()
ax.errorbar(d[\"v_pulse\"], p, yerr=err, fmt=\"o-\", capsize=3)
ax.set_xlabel(\"V_pulse (V)\")
ax.set_ylabel(\"P_switch\")
ax.set_ylim(-0.02, 1.02)
fig.tight_layout()
fig.savefig(os.path.join(HERE, \"switching.png\"), dpi=150)
",
    },
];

fn matches(pattern: &str, name: &str) -> bool {
    match pattern.strip_suffix('*') {
        Some(prefix) => name.starts_with(prefix) && name.ends_with(".csv"),
        None => name == pattern,
    }
}

/// Scripts for every figure whose input is among `names`.
pub fn scripts_for(names: &[&str]) -> Vec<Artifact> {
    FIGURES
        .iter()
        .filter(|f| names.iter().any(|n| matches(f.input, n)))
        .map(|f| Artifact::new(f.script, format!("{HEADER}{}", f.body)))
        .collect()
}

/// Every CSV some figure can read, for error messages.
pub fn expected_inputs() -> Vec<&'static str> {
    FIGURES.iter().map(|f| f.input).collect()
}
