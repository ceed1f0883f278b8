"""Figure rendering for sweep results and angular spectra.

Plots are written straight to files next to the CSV output; nothing here
requires a display.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

AXIS_LABELS = {
    "snr_db": "direct-link SNR per antenna (dB)",
    "d1_m": "tag-to-receiver distance d1 (m)",
    "code_order": "codeword order K (M = 2^K)",
}


def render_ber_curve(records, path, title: str | None = None) -> None:
    """Semilog BER curve with Wilson 95% band, saved to ``path``."""
    rows = [r for r in records if r.error is None and r.trials > 0]
    if not rows:
        raise ValueError("no successful sweep points to plot")
    x = np.array([r.axis_value for r in rows])
    ber = np.array([max(r.ber, 0.5 / r.trials) for r in rows])
    lo = np.array([max(r.ci_low, 1e-12) for r in rows])
    hi = np.array([max(r.ci_high, 1e-12) for r in rows])

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.semilogy(x, ber, "o-", color="tab:blue", label="measured BER")
    ax.fill_between(x, lo, hi, color="tab:blue", alpha=0.2, label="Wilson 95% CI")
    zeros = [r.axis_value for r in rows if r.errors == 0]
    if zeros:
        ax.plot(
            zeros,
            [0.5 / r.trials for r in rows if r.errors == 0],
            "v",
            color="tab:blue",
            label="no errors observed",
        )
    ax.set_xlabel(AXIS_LABELS.get(rows[0].axis_name, rows[0].axis_name))
    ax.set_ylabel("bit error rate")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_spectrum(spectrum, path, peak_deg: float | None = None, title: str | None = None) -> None:
    """Bartlett angular spectrum on a dB scale, saved to ``path``."""
    power = np.asarray(spectrum.power, dtype=float)
    floor = max(power.max(), 1e-300) * 1e-12
    power_db = 10.0 * np.log10(np.maximum(power, floor))

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(spectrum.grid_degrees, power_db, color="tab:blue")
    if peak_deg is not None:
        ax.axvline(peak_deg, color="tab:red", linestyle="--", label=f"peak {peak_deg:.2f} deg")
        ax.legend()
    ax.set_xlabel("scan angle (deg)")
    ax.set_ylabel("beam output power (dB)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
