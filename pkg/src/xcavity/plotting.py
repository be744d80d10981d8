"""Optional PNG renderings of the tables the CLI writes (``--plot``)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def spectrum(path, detuning, intensity, title=""):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(detuning, intensity, lw=1)
    ax.set_xlabel(r"detuning $\Delta$ [$\gamma_0$]")
    ax.set_ylabel(r"$|r|^2$")
    ax.set_title(title, fontsize=9)
    _save(fig, path)


def rocking(path, theta, refl, title=""):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(theta, refl, lw=1)
    ax.set_xlabel(r"$\theta$ [mrad]")
    ax.set_ylabel(r"$|r_{el}|^2$")
    ax.set_title(title, fontsize=9)
    _save(fig, path)


def params(path, theta, cls, sr, fe, title=""):
    fig, (a, b) = plt.subplots(1, 2, figsize=(9, 3.5))
    a.plot(theta, cls, label="CLS")
    a.plot(theta, sr, label="SR")
    a.plot(theta, fe, label="|E|$^2$", lw=0.8)
    a.set_xlabel(r"$\theta$ [mrad]")
    a.set_ylabel(r"[$\gamma_0$]")
    a.legend(fontsize=8)
    b.plot(cls, sr, lw=1)
    b.set_xlabel(r"$\Delta_{CLS}$ [$\gamma_0$]")
    b.set_ylabel(r"$\Gamma_{SR}$ [$\gamma_0$]")
    fig.suptitle(title, fontsize=9)
    _save(fig, path)


def poles(path, theta0, residues, title=""):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    t = np.asarray(theta0)
    size = 10 + 90 * np.abs(residues) / max(np.max(np.abs(residues)), 1e-300) if len(t) else 10
    ax.scatter(t.real, t.imag, s=size)
    ax.set_xlabel(r"Re $\theta_0$ [mrad]")
    ax.set_ylabel(r"Im $\theta_0$ [mrad]")
    ax.set_title(title, fontsize=9)
    _save(fig, path)


def trace(path, points, samples, pair, title=""):
    fig, ax = plt.subplots(figsize=(5, 4))
    if samples is not None and len(samples):
        ax.plot(samples[:, 0], samples[:, 1], ".", ms=1, color="0.7")
    p = np.asarray(points)
    if len(p):
        ax.plot(p[:, 0], p[:, 1], "o-", ms=3)
    ax.set_xlabel(f"{pair[0]} (normalised)")
    ax.set_ylabel(f"{pair[1]} (normalised)")
    ax.set_title(title, fontsize=9)
    _save(fig, path)


def grid(path, ax1, ax2, sr, fe, names, title=""):
    fig, axs = plt.subplots(1, 2, figsize=(9, 3.8))
    for a, data, label in zip(axs, (sr, fe), (r"$\Gamma$", r"$|E|^2$")):
        m = a.pcolormesh(ax2, ax1, data, shading="auto")
        fig.colorbar(m, ax=a, label=label)
        a.set_xlabel(names[1])
        a.set_ylabel(names[0])
    fig.suptitle(title, fontsize=9)
    _save(fig, path)
