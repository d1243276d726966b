"""Deterministic data families for the boundary-trace probes.

Random families use a counter-based generator so any implementation can
reproduce the streams: member ``m`` of a family seeded with ``s`` draws from
``numpy`` Philox4x64-10 keyed with ``[s, m]``, takes ``2 N`` uniform doubles
(:meth:`numpy.random.Generator.random`), and maps them through the inverse
standard-normal CDF.  The first ``N`` become multipliers for ``u0``, the
rest for ``u1``; coefficient ``n`` is then ``multiplier * n**(-p)``.

Truncations are nested: requesting the family at a smaller ``N`` yields
prefixes of the same coefficient vectors, so growth factors across an
N-schedule compare like with like.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

__all__ = ["family_members", "parse_family"]


def parse_family(spec: str) -> tuple[str, dict[str, float]]:
    """Parse a family spec string.

    Recognized forms: ``single-u0``, ``single-u1``, ``decay:p``,
    ``worst:K[:p]`` (K random members of decay p, default 1.5).
    """
    parts = spec.split(":")
    kind = parts[0].strip().lower()
    if kind in ("single-u0", "single-u1"):
        return kind, {}
    if kind == "decay":
        if len(parts) != 2:
            raise ValueError(f"decay family needs an exponent: {spec!r}")
        return kind, {"p": float(parts[1])}
    if kind == "worst":
        if len(parts) < 2:
            raise ValueError(f"worst-of-K family needs K: {spec!r}")
        params = {"K": float(parts[1]), "p": 1.5}
        if len(parts) > 2:
            params["p"] = float(parts[2])
        return kind, params
    raise ValueError(f"unknown family spec {spec!r}")


def _gaussian_draws(seed: int, member: int, count: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=[seed, member]))
    u = gen.random(count)
    return ndtri(np.clip(u, 1e-300, 1.0 - 1e-16))


def family_members(
    spec: str, N: int, seed: int = 42, members: int = 8
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Materialize (u0, u1) coefficient pairs on the first N modes."""
    kind, params = parse_family(spec)
    if kind == "single-u0":
        out = []
        for n in range(N):
            u0 = np.zeros(N)
            u0[n] = 1.0
            out.append((u0, np.zeros(N)))
        return out
    if kind == "single-u1":
        out = []
        for n in range(N):
            u1 = np.zeros(N)
            u1[n] = 1.0
            out.append((np.zeros(N), u1))
        return out
    if kind == "worst":
        members = int(params["K"])
    p = params["p"]
    decay = np.arange(1, N + 1, dtype=float) ** (-p)
    out = []
    for m in range(members):
        g = _gaussian_draws(seed, m, 2 * N)
        out.append((g[:N] * decay, g[N:] * decay))
    return out
