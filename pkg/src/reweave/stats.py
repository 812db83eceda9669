"""Corpus-wide co-occurrence statistics: P(g), P(g|w), P(w|g).

Counting is instance-level and binary: an instance containing a fragment
string (or feature) twice still contributes one. Fragment identity across
instances is the joined lowercase token string; spans stay instance-local.
"""
from __future__ import annotations

from .corpus import Corpus, Feature
from .errors import DataError, UnknownFragmentError


def _key(g) -> str:
    return g.key if isinstance(g, Feature) else str(g)


class CooccurrenceTable:
    def __init__(self, n_instances: int, fragment_instances, feature_instances):
        self.n = n_instances
        self._fragments = fragment_instances
        self._features = feature_instances

    @classmethod
    def build(cls, corpus: Corpus, max_len: int | None = None) -> "CooccurrenceTable":
        """Record, for every fragment string of length <= max_len and every
        feature, the set of instance ids it occurs in."""
        if not corpus.instances:
            raise DataError("cannot build statistics for an empty corpus")
        fragments: dict[str, set[str]] = {}
        features: dict[str, set[str]] = {}
        for inst in corpus.instances:
            toks = inst.tokens
            n = len(toks)
            cap = n if max_len is None else min(max_len, n)
            seen_here = set()
            for length in range(1, cap + 1):
                for s in range(n - length + 1):
                    seen_here.add(" ".join(toks[s:s + length]))
            for w in seen_here:
                fragments.setdefault(w, set()).add(inst.id)
            for f in inst.cc:
                features.setdefault(f.key, set()).add(inst.id)
        return cls(len(corpus.instances), fragments, features)

    def fragment_instances(self, w: str) -> frozenset:
        return frozenset(self._fragments.get(w, ()))

    def feature_instances(self, g) -> frozenset:
        return frozenset(self._features.get(_key(g), ()))

    def known_fragment(self, w: str) -> bool:
        return w in self._fragments

    def p_feature(self, g) -> float:
        """P(g): share of instances whose CC contains g; 0 for unknown g."""
        return len(self._features.get(_key(g), ())) / self.n

    def p_feature_given_fragment(self, g, w: str) -> float:
        """P(g|w) over the instances containing fragment string w."""
        try:
            iw = self._fragments[w]
        except KeyError:
            raise UnknownFragmentError(f"fragment not in corpus: {w!r}") from None
        ig = self._features.get(_key(g), set())
        return len(ig & iw) / len(iw)

    def p_fragment_given_feature(self, w: str, g) -> float:
        """P(w|g) over the instances containing feature g."""
        ig = self._features.get(_key(g), set())
        if not ig:
            raise DataError(f"feature has no instances: {_key(g)!r}")
        iw = self._fragments.get(w, set())
        return len(iw & ig) / len(ig)
