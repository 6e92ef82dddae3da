from enum import Enum


class CheckEnum(str, Enum):
    """
    Base class for string-valued enums used as stable identifiers
    (check names, modules, policies). Values are what appears in config files
    and reports.
    """

    @classmethod
    def values(cls) -> set[str]:
        return {m.value for m in cls}

    @classmethod
    def labels(cls) -> list[str]:
        return [m.name for m in cls]

    @classmethod
    def has(cls, value: str | None) -> bool:
        if value is None:
            return False
        return value in cls.values()

    @classmethod
    def try_name(cls, value: str | None) -> str | None:
        if value is None:
            return None
        try:
            return cls(value).name
        except ValueError:
            return None


class CheckModule(CheckEnum):
    geometry = "geometry"
    semigroup = "semigroup"


class CheckName(CheckEnum):
    starlike_disk = "starlike_disk"
    hyperbolic_convexity = "hyperbolic_convexity"
    lemma_bounds = "lemma_bounds"
    subordination = "subordination"
    squeezing = "squeezing"
    sector = "sector"
    resolvent_generator = "resolvent_generator"
    uniform_bound = "uniform_bound"
    normalized_convergence = "normalized_convergence"
