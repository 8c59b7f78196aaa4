"""Feature schemas for tabular data."""

from __future__ import annotations

from dataclasses import dataclass, field

from irkit.errors import SchemaError

NUMERICAL = "numerical"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Feature:
    name: str
    kind: str
    categories: tuple = ()

    def __post_init__(self):
        if self.kind not in (NUMERICAL, CATEGORICAL):
            raise SchemaError(f"unknown feature kind {self.kind!r}")
        if self.kind == CATEGORICAL:
            if not self.categories:
                raise SchemaError(f"categorical feature {self.name!r} needs categories")
            if len(set(self.categories)) != len(self.categories):
                raise SchemaError(f"duplicate categories on feature {self.name!r}")
        elif self.categories:
            raise SchemaError(f"numerical feature {self.name!r} cannot list categories")


@dataclass(frozen=True)
class FeatureSchema:
    features: tuple[Feature, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise SchemaError("feature names must be unique")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @classmethod
    def of(cls, *specs) -> "FeatureSchema":
        """Build a schema from (name, kind[, categories]) tuples or Features."""
        feats = []
        for s in specs:
            if isinstance(s, Feature):
                feats.append(s)
            else:
                name, kind = s[0], s[1]
                cats = tuple(s[2]) if len(s) > 2 else ()
                feats.append(Feature(name, kind, cats))
        return cls(tuple(feats))

    @classmethod
    def numeric(cls, names) -> "FeatureSchema":
        return cls(tuple(Feature(n, NUMERICAL) for n in names))

    @property
    def arity(self) -> int:
        return len(self.features)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"no feature named {name!r}") from None

    def is_numerical(self, j: int) -> bool:
        return self.features[j].kind == NUMERICAL

    @property
    def numerical_indices(self) -> tuple[int, ...]:
        return tuple(j for j, f in enumerate(self.features) if f.kind == NUMERICAL)

    @property
    def all_numerical(self) -> bool:
        return all(f.kind == NUMERICAL for f in self.features)
