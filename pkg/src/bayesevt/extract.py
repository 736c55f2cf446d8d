"""Block maxima, threshold excesses and empirical benchmarks."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptySampleError


@dataclass(frozen=True)
class TimeSeries:
    """Observations ordered in time.

    ``times`` is either ``datetime64[D]`` (needed for calendar-year blocks) or
    an integer position. ``labels`` optionally tags every point with a series
    name, so several indexes can live in one object; times must be strictly
    increasing within each label.
    """

    times: np.ndarray
    values: np.ndarray
    name: str = "series"
    labels: np.ndarray | None = None

    def __post_init__(self):
        times = np.asarray(self.times)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or values.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if not np.all(np.isfinite(values)):
            raise ValueError("time series values must be finite")
        labels = None if self.labels is None else np.asarray(self.labels, dtype=str)
        if labels is not None and labels.shape != values.shape:
            raise ValueError("labels must have one entry per observation")
        for lab in self.label_names(labels):
            t = times if labels is None else times[labels == lab]
            if t.size > 1 and not np.all(t[1:] > t[:-1]):
                raise ValueError(f"timestamps must be strictly increasing (series {lab!r})")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.values.size

    @staticmethod
    def label_names(labels):
        if labels is None:
            return [""]
        _, first = np.unique(labels, return_index=True)
        return [str(labels[i]) for i in np.sort(first)]

    def split_labels(self):
        """Yield ``(label, times, values)`` per series, in first-seen order."""
        for lab in self.label_names(self.labels):
            if self.labels is None:
                yield lab, self.times, self.values
            else:
                m = self.labels == lab
                yield lab, self.times[m], self.values[m]

    def slice(self, mask) -> "TimeSeries":
        mask = np.asarray(mask, dtype=bool)
        labels = None if self.labels is None else self.labels[mask]
        return TimeSeries(self.times[mask], self.values[mask], self.name, labels)


@dataclass(frozen=True)
class ExtremesSample:
    """One (sign-adjusted) maximum per block plus its random-effects group."""

    values: np.ndarray
    block_ids: tuple[str, ...]
    group_ids: np.ndarray
    group_labels: tuple[str, ...]
    block_spec: str = "year"
    sign: int = 1

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        gids = np.asarray(self.group_ids, dtype=np.int64)
        if values.ndim != 1 or gids.shape != values.shape or len(self.block_ids) != values.size:
            raise ValueError("values, block_ids and group_ids must align")
        if values.size and (gids.min() < 0 or gids.max() >= len(self.group_labels)):
            raise ValueError("group_ids must index group_labels")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "group_ids", gids)
        object.__setattr__(self, "block_ids", tuple(self.block_ids))
        object.__setattr__(self, "group_labels", tuple(self.group_labels))

    def __len__(self):
        return self.values.size

    @property
    def n_groups(self) -> int:
        return len(self.group_labels)

    def select_groups(self, groups) -> "ExtremesSample":
        """Sub-sample restricted to the given group indices, relabelled 0..G'-1."""
        groups = list(groups)
        mask = np.isin(self.group_ids, groups)
        remap = {g: i for i, g in enumerate(groups)}
        return ExtremesSample(
            self.values[mask],
            tuple(b for b, m in zip(self.block_ids, mask) if m),
            np.array([remap[g] for g in self.group_ids[mask]], dtype=np.int64),
            tuple(self.group_labels[g] for g in groups),
            self.block_spec,
            self.sign,
        )

    def pooled(self) -> "ExtremesSample":
        """Same maxima with every block in a single group."""
        return ExtremesSample(
            self.values, self.block_ids, np.zeros(len(self), dtype=np.int64), ("all",),
            self.block_spec, self.sign,
        )

    def to_dict(self) -> dict:
        return {
            "kind": "block-maxima",
            "block_spec": self.block_spec,
            "sign": self.sign,
            "values": self.values.tolist(),
            "block_ids": list(self.block_ids),
            "group_ids": self.group_ids.tolist(),
            "group_labels": list(self.group_labels),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExtremesSample":
        if d.get("kind") != "block-maxima":
            raise ValueError(f"not a block-maxima sample: kind={d.get('kind')!r}")
        return cls(
            np.array(d["values"], dtype=float), tuple(d["block_ids"]),
            np.array(d["group_ids"], dtype=np.int64), tuple(d["group_labels"]),
            d.get("block_spec", "year"), int(d.get("sign", 1)),
        )


@dataclass(frozen=True)
class ExceedanceSample:
    """Excesses ``x - u`` of the observations above ``u``."""

    excesses: np.ndarray
    u: float
    n_total: int
    n_exceed: int = field(init=False)

    def __post_init__(self):
        x = np.asarray(self.excesses, dtype=float)
        if x.size == 0:
            raise EmptySampleError(f"no observation exceeds the threshold u={self.u}")
        if np.any(x <= 0.0):
            raise ValueError("excesses must be strictly positive")
        if x.size > self.n_total:
            raise ValueError("more exceedances than observations")
        object.__setattr__(self, "excesses", x)
        object.__setattr__(self, "n_exceed", int(x.size))

    @property
    def exceed_fraction(self) -> float:
        return self.n_exceed / self.n_total

    def to_dict(self) -> dict:
        return {
            "kind": "exceedances",
            "u": self.u,
            "n_total": self.n_total,
            "n_exceed": self.n_exceed,
            "excesses": self.excesses.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExceedanceSample":
        if d.get("kind") != "exceedances":
            raise ValueError(f"not an exceedance sample: kind={d.get('kind')!r}")
        return cls(np.array(d["excesses"], dtype=float), float(d["u"]), int(d["n_total"]))


def parse_block(block) -> int | str:
    """``"year"`` or a positive block length (int, ``"n:<int>"`` or digits)."""
    if isinstance(block, str):
        if block == "year":
            return "year"
        text = block[2:] if block.startswith("n:") else block
        try:
            block = int(text)
        except ValueError:
            raise ConfigError(f"unknown block spec {block!r}; use 'year' or 'n:<int>'") from None
    if int(block) < 1:
        raise ConfigError(f"block length must be at least 1, got {block}")
    return int(block)


def parse_group(group) -> tuple[str, int]:
    """Normalise a group spec to ``(kind, m)``.

    Accepted: ``None``/``"none"``, ``"every:<M>"``, ``"label"``, ``"block"``.
    """
    if group is None or group == "none":
        return "none", 0
    if group in ("label", "block"):
        return group, 0
    if isinstance(group, str) and group.startswith("every:"):
        try:
            m = int(group.split(":", 1)[1])
        except ValueError:
            m = 0
        if m >= 1:
            return "every", m
    raise ConfigError(f"unknown group spec {group!r}")


def block_maxima(series: TimeSeries, block="year", group="none", sign: int = 1) -> ExtremesSample:
    """Maximum of ``sign * value`` within each block.

    ``block`` is ``"year"`` (calendar year of the timestamp; partial years are
    kept) or a fixed block length. ``group`` assigns blocks to random-effect
    groups: ``"every:M"`` makes contiguous runs of M blocks, ``"label"`` uses
    the series label and ``"block"`` puts each block key (e.g. a year) in its
    own group, shared across labels. Use ``sign=-1`` to analyse minima.
    """
    if sign not in (1, -1):
        raise ConfigError("sign must be +1 or -1")
    if len(series) == 0:
        raise EmptySampleError("empty time series")
    block = parse_block(block)
    gkind, gm = parse_group(group)
    multi = series.labels is not None

    values, block_ids, group_keys = [], [], []
    for lab, times, vals in series.split_labels():
        if block == "year":
            if not np.issubdtype(times.dtype, np.datetime64):
                raise ConfigError("calendar-year blocks need datetime timestamps")
            keys = times.astype("datetime64[Y]").astype(np.int64) + 1970
        else:
            keys = np.arange(vals.size) // block
        # keys are nondecreasing because times are sorted within the label
        starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
        maxima = np.maximum.reduceat(sign * vals, starts)
        for j, (start, m) in enumerate(zip(starts, maxima)):
            key = str(keys[start])
            bid = f"{lab}:{key}" if multi else key
            values.append(float(m))
            block_ids.append(bid)
            if gkind == "none":
                group_keys.append("all")
            elif gkind == "every":
                g = str(j // gm)
                group_keys.append(f"{lab}:{g}" if multi else g)
            elif gkind == "label":
                group_keys.append(lab if multi else "all")
            else:
                group_keys.append(key)

    labels = list(dict.fromkeys(group_keys))
    if gkind == "block":
        labels.sort(key=_natural_key)
    index = {g: i for i, g in enumerate(labels)}
    spec = "year" if block == "year" else f"n:{block}"
    return ExtremesSample(
        np.array(values), tuple(block_ids), np.array([index[g] for g in group_keys], dtype=np.int64),
        tuple(labels), spec, sign,
    )


def _natural_key(s):
    try:
        return (0, int(s), s)
    except ValueError:
        return (1, 0, s)


def exceedances(series: TimeSeries, u: float) -> ExceedanceSample:
    """Excesses over the fixed threshold ``u``, with counts for the VaR formula."""
    if not np.isfinite(u):
        raise ConfigError("threshold must be finite")
    x = series.values
    return ExceedanceSample(x[x > u] - u, float(u), int(x.size))


def _values(sample) -> np.ndarray:
    if isinstance(sample, ExtremesSample):
        return sample.values
    if isinstance(sample, TimeSeries):
        return sample.values
    return np.asarray(sample, dtype=float)


def empirical_return_level(sample, k: float) -> float:
    """Empirical ``1 - 1/k`` quantile of the maxima (linear interpolation)."""
    if not k >= 2:
        raise ValueError(f"return period k must be >= 2, got {k}")
    x = _values(sample)
    if x.size == 0:
        raise EmptySampleError("no maxima")
    return float(np.quantile(x, 1.0 - 1.0 / k))


def empirical_return_level_by_group(sample: ExtremesSample, k: float) -> np.ndarray:
    """Empirical return level computed within each group separately."""
    return np.array([
        empirical_return_level(sample.values[sample.group_ids == g], k)
        for g in range(sample.n_groups)
    ])


def bootstrap_return_level_ci(sample, k: float, rng: np.random.Generator,
                              n_boot: int = 2000, level: float = 0.95) -> tuple[float, float]:
    """Percentile bootstrap interval for :func:`empirical_return_level`."""
    x = _values(sample)
    idx = rng.integers(0, x.size, size=(n_boot, x.size))
    stats = np.quantile(x[idx], 1.0 - 1.0 / k, axis=1)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(stats, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


def empirical_var_es(series, p: float) -> tuple[float, float]:
    """Empirical ``(VaR_p, ES_p)``.

    VaR is the ``1 - p`` quantile (linear interpolation); ES is the mean of
    the observations strictly above it.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"tail probability must be in (0, 1), got {p}")
    x = _values(series)
    var = float(np.quantile(x, 1.0 - p))
    tail = x[x > var]
    if tail.size == 0:
        raise EmptySampleError("no observation above the empirical VaR; ES is undefined")
    return var, float(tail.mean())
