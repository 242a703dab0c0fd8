"""Sparse pure states on the four output modes (a, a_perp, b, b_perp).

A state is stored as two parallel arrays: an ``(T, 4)`` integer array of
occupation numbers and a length-``T`` array of amplitudes, kept in
lexicographic order of ``(j, k, l, m)``.  Amplitudes are real for every
state the beam splitter produces; a complex array is accepted so the
phase-shifted variant used in tests can share this type.
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, NamedTuple

import numpy as np

from .errors import StateError

# Tolerated excess of sum |amp|^2 over one, from rounding in large expansions.
NORM_SLACK = 1e-12


class Occupation4(NamedTuple):
    """Photon counts in modes a (j), a_perp (k), b (l) and b_perp (m).

    Fields may be plain ints or equal-length integer arrays; the latter is
    how :func:`expectation` hands the whole basis to an observable at once.
    """

    j: int
    k: int
    l: int
    m: int

    @property
    def n_a(self):
        return self.j + self.k

    @property
    def n_b(self):
        return self.l + self.m

    @property
    def total(self):
        return self.j + self.k + self.l + self.m


def _packed_keys(occ: np.ndarray) -> np.ndarray:
    """One int64 per row whose order is the lexicographic order of (j, k, l, m)."""
    if occ.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    base = int(occ.max()) + 1
    if base**4 >= 2**62:
        # fall back to a rank per column; still order preserving
        return np.lexsort(occ.T[::-1]).argsort().astype(np.int64)
    keys = occ[:, 0].astype(np.int64)
    for col in range(1, 4):
        keys *= base
        keys += occ[:, col]
    return keys


class SparseState:
    """Immutable truncated superposition of four-mode Fock vectors.

    Build instances with :func:`make_state` or :func:`homrates.beamsplitter.expand_output`.
    The constructor drops zero amplitudes, sorts canonically and rejects
    negative counts, duplicate keys and total weight above one.
    """

    __slots__ = ("_occ", "_amp", "truncation_order", "norm_deficit")

    def __init__(self, occupations: np.ndarray, amplitudes: np.ndarray, truncation_order: int):
        occ = np.asarray(occupations).reshape(-1, 4)
        if occ.dtype != np.int32:
            if occ.size and occ.max(initial=0) > np.iinfo(np.int32).max:
                raise StateError("photon counts too large")
            occ = occ.astype(np.int32)
        amp = np.array(amplitudes)
        if amp.dtype.kind not in "fc":
            amp = amp.astype(np.float64)
        if occ.shape[0] != amp.shape[0]:
            raise StateError("occupations and amplitudes differ in length")
        if truncation_order < 0:
            raise StateError(f"truncation order must be >= 0, got {truncation_order}")
        if occ.size and occ.min() < 0:
            raise StateError("photon counts must be non-negative")

        keep = amp != 0
        if not keep.all():
            occ, amp = occ[keep], amp[keep]
        keys = _packed_keys(occ)
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        if keys.shape[0] > 1 and np.any(keys[1:] == keys[:-1]):
            raise StateError("duplicate occupation keys")
        del keys
        occ, amp = occ[order], amp[order]

        weight = float(np.sum(np.abs(amp) ** 2))
        if weight > 1.0 + NORM_SLACK:
            raise StateError(f"total weight {weight!r} exceeds 1")

        occ.setflags(write=False)
        amp.setflags(write=False)
        self._occ = occ
        self._amp = amp
        self.truncation_order = int(truncation_order)
        self.norm_deficit = max(0.0, 1.0 - weight)

    @property
    def occupations(self) -> np.ndarray:
        return self._occ

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amp

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self._amp) ** 2

    @property
    def is_complex(self) -> bool:
        return self._amp.dtype.kind == "c"

    def columns(self) -> Occupation4:
        """Occupation numbers as an :class:`Occupation4` of column arrays."""
        return Occupation4(*self._occ.T)

    def __len__(self) -> int:
        return self._occ.shape[0]

    def __iter__(self) -> Iterator[tuple[Occupation4, complex]]:
        for row, a in zip(self._occ.tolist(), self._amp.tolist()):
            yield Occupation4(*row), a

    def amplitude(self, occupation: Iterable[int]) -> complex:
        """Amplitude of one basis vector, zero if absent."""
        target = np.asarray(tuple(occupation), dtype=np.int64)
        hits = np.flatnonzero(np.all(self._occ == target, axis=1))
        return self._amp[hits[0]].item() if hits.size else 0.0

    def as_dict(self) -> dict[Occupation4, complex]:
        return dict(iter(self))

    def __repr__(self) -> str:
        return (
            f"SparseState(terms={len(self)}, truncation_order={self.truncation_order}, "
            f"norm_deficit={self.norm_deficit:.3e})"
        )


def make_state(entries: Iterable[tuple[Iterable[int], complex]], truncation_order: int) -> SparseState:
    """Build a state from ``(occupation, amplitude)`` pairs.

    Zero amplitudes are dropped.  Duplicate occupations, negative counts or
    total weight above one raise :class:`StateError`.
    """
    entries = list(entries)
    if not entries:
        return SparseState(np.zeros((0, 4), dtype=np.int64), np.zeros(0), truncation_order)
    occs = []
    for occ, _ in entries:
        occ = tuple(int(x) for x in occ)
        if len(occ) != 4:
            raise StateError(f"occupation {occ} does not have four modes")
        occs.append(occ)
    amps = np.array([a for _, a in entries])
    return SparseState(np.array(occs, dtype=np.int64), amps, truncation_order)


def expectation(state: SparseState, f: Callable[[Occupation4], object]) -> float:
    """Expectation of an observable diagonal in the Fock basis.

    ``f`` is called once with an :class:`Occupation4` whose fields are the
    column arrays of the basis, so it must be written with array operations
    (``o.n_a * o.n_b`` works, Python ``if`` on a field does not).  A scalar
    return value is broadcast to every term.
    """
    if len(state) == 0:
        return 0.0
    values = np.broadcast_to(np.asarray(f(state.columns()), dtype=np.float64), (len(state),))
    return float(np.dot(state.probabilities, values))
