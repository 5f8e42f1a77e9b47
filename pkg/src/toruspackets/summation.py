"""Deterministic reductions.

Scalar reductions go through ``math.fsum`` (exactly rounded, so independent of
ordering). Batched reductions use Neumaier-compensated accumulation along one
axis in a fixed index order.
"""
import math

import numpy as np


def fsum_complex(values):
    values = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(values.real), math.fsum(values.imag))


def kahan_sum(values, axis=0):
    """Neumaier-compensated sum of ``values`` along ``axis``.

    Terms are added in increasing index order; the result does not depend on
    how the caller partitions other axes across workers.
    """
    values = np.moveaxis(np.asarray(values), axis, 0)
    if values.shape[0] == 0:
        return np.zeros(values.shape[1:], dtype=values.dtype)
    if np.iscomplexobj(values):
        return kahan_sum(values.real, 0) + 1j * kahan_sum(values.imag, 0)
    total = values[0].astype(float, copy=True)
    comp = np.zeros_like(total)
    for term in values[1:]:
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        total = t
    return total + comp


class KahanAccumulator:
    """Running compensated sum for arrays built term by term."""

    def __init__(self, shape, dtype=complex):
        self._complex = np.issubdtype(np.dtype(dtype), np.complexfloating)
        self._re = np.zeros(shape)
        self._re_c = np.zeros(shape)
        if self._complex:
            self._im = np.zeros(shape)
            self._im_c = np.zeros(shape)

    @staticmethod
    def _add(total, comp, term):
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        return t

    def add(self, term):
        term = np.asarray(term)
        if self._complex:
            self._re = self._add(self._re, self._re_c, term.real)
            self._im = self._add(self._im, self._im_c, term.imag)
        else:
            self._re = self._add(self._re, self._re_c, term)

    @property
    def value(self):
        if self._complex:
            return (self._re + self._re_c) + 1j * (self._im + self._im_c)
        return self._re + self._re_c
