"""On-disk cache of f~_{p,q} and inner sums.

One JSON file per cache directory.  Rationals are stored as decimal
numerator/denominator strings, so a round trip is lossless.  A file is
trusted only if its format version matches, its sha256 checksum matches the
payload, and a few entries recompute to the same values; anything else is
reported with a :class:`CacheWarning` and ignored.

The directory comes from, in order: an explicit argument, the
``SPHEREMASS_CACHE_DIR`` environment variable, ``~/.cache/spheremass``.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .exactnum import ExactValue, unbounded_int_digits
from .integrals import f_tilde
from .mass import SpectralTable, build_spectral_table, inner_sum, install_table

__all__ = [
    "FORMAT_VERSION",
    "CACHE_ENV",
    "CacheWarning",
    "CacheFile",
    "cache_dir",
    "cache_path",
    "load",
    "store",
    "clear",
    "info",
    "table_for",
]

FORMAT_VERSION = 1
CACHE_ENV = "SPHEREMASS_CACHE_DIR"
FILENAME = "coefficients.json"


class CacheWarning(UserWarning):
    pass


class _Invalid(Exception):
    pass


def cache_dir(override: str | os.PathLike | None = None) -> Path:
    if override:
        return Path(override).expanduser()
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env).expanduser()
    return Path.home() / ".cache" / "spheremass"


def cache_path(directory: str | os.PathLike | None = None) -> Path:
    return cache_dir(directory) / FILENAME


def _enc(v: ExactValue) -> list[str]:
    return [str(v.a.numerator), str(v.a.denominator), str(v.b.numerator), str(v.b.denominator)]


def _dec(parts) -> ExactValue:
    if len(parts) != 4:
        raise _Invalid("bad rational entry")
    an, ad, bn, bd = (int(s) for s in parts)
    if ad <= 0 or bd <= 0:
        raise _Invalid("nonpositive denominator")
    return ExactValue(Fraction(an, ad), Fraction(bn, bd))


@dataclass(frozen=True)
class CacheFile:
    """Exact coefficient tables for ``0 <= p <= q <= n`` and ``0 <= j <= k <= n``.

    Both tables are symmetric, so only the upper triangle is stored.
    """

    n: int
    f_tilde: dict
    inner: dict

    @classmethod
    def build(cls, n: int, threads: int = 1) -> "CacheFile":
        return cls.from_table(build_spectral_table(n, threads))

    @classmethod
    def from_table(cls, table: SpectralTable) -> "CacheFile":
        n = table.n
        ft = {(p, q): f_tilde(p, q) for p in range(n + 1) for q in range(p, n + 1)}
        inner = {(j, k): table.inner(j, k) for j in range(n + 1) for k in range(j, n + 1)}
        return cls(n, ft, inner)

    def payload(self) -> dict:
        return {
            "n": self.n,
            "f_tilde": [[p, q, *_enc(v)] for (p, q), v in sorted(self.f_tilde.items())],
            "inner_sum": [[j, k, *_enc(v)] for (j, k), v in sorted(self.inner.items())],
        }

    def to_json(self) -> str:
        with unbounded_int_digits():
            payload = self.payload()
        body = json.dumps(payload, separators=(",", ":"), sort_keys=True)
        digest = hashlib.sha256(body.encode()).hexdigest()
        # the checksum covers the exact payload bytes, which are embedded verbatim
        return '{"format_version":%d,"sha256":"%s","payload":%s}' % (FORMAT_VERSION, digest, body)

    @classmethod
    def from_json(cls, text: str) -> "CacheFile":
        try:
            head, sep, rest = text.partition(',"payload":')
            if not sep or not rest.endswith("}"):
                raise _Invalid("not a cache file")
            meta = json.loads(head + "}")
            if meta.get("format_version") != FORMAT_VERSION:
                raise _Invalid(
                    f"format version {meta.get('format_version')!r}, expected {FORMAT_VERSION}"
                )
            body = rest[:-1]
            if hashlib.sha256(body.encode()).hexdigest() != meta.get("sha256"):
                raise _Invalid("checksum mismatch")
            with unbounded_int_digits():
                payload = json.loads(body)
                n = int(payload["n"])
                ft = {(int(r[0]), int(r[1])): _dec(r[2:]) for r in payload["f_tilde"]}
                inner = {(int(r[0]), int(r[1])): _dec(r[2:]) for r in payload["inner_sum"]}
        except _Invalid:
            raise
        except (ValueError, KeyError, TypeError, IndexError) as exc:
            raise _Invalid(f"malformed cache: {exc}") from exc
        want = (n + 1) * (n + 2) // 2
        if n < 0 or len(ft) != want or len(inner) != want:
            raise _Invalid("incomplete tables")
        return cls(n, ft, inner)

    def spot_check(self) -> None:
        """Recompute a handful of entries from scratch."""
        n = self.n
        picks = sorted({(0, 0), (0, n), (n // 2, n), (n, n), (n // 3, (2 * n) // 3)})
        for p, q in picks:
            if self.f_tilde[(p, q)] != f_tilde(p, q):
                raise _Invalid(f"f~({p},{q}) does not recompute")
        for j, k in picks[:4]:
            if self.inner[(j, k)] != inner_sum(j, k):
                raise _Invalid(f"inner sum ({j},{k}) does not recompute")

    def to_table(self) -> SpectralTable:
        values = {}
        for (j, k), v in self.inner.items():
            values[(j, k)] = v
            values[(k, j)] = v
        return SpectralTable.from_inner_sums(self.n, values)


def load(directory=None, *, verify: bool = True) -> CacheFile | None:
    """Read and validate the cache; ``None`` (with a warning) if unusable."""
    path = cache_path(directory)
    if not path.exists():
        return None
    try:
        cf = CacheFile.from_json(path.read_text())
        if verify:
            cf.spot_check()
    except _Invalid as exc:
        warnings.warn(f"ignoring cache {path}: {exc}", CacheWarning, stacklevel=2)
        return None
    except OSError as exc:
        warnings.warn(f"cannot read cache {path}: {exc}", CacheWarning, stacklevel=2)
        return None
    return cf


def store(cf: CacheFile, directory=None) -> Path | None:
    """Atomically write ``cf``; returns the path, or ``None`` on I/O failure."""
    path = cache_path(directory)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=".coefficients-", suffix=".tmp", dir=path.parent)
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(cf.to_json())
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
    except OSError as exc:
        warnings.warn(f"cannot write cache {path}: {exc}", CacheWarning, stacklevel=2)
        return None
    return path


def clear(directory=None) -> bool:
    path = cache_path(directory)
    try:
        path.unlink()
    except FileNotFoundError:
        return False
    return True


def info(directory=None) -> dict:
    path = cache_path(directory)
    out = {"path": str(path), "exists": path.exists(), "format_version": FORMAT_VERSION}
    if path.exists():
        out["bytes"] = path.stat().st_size
        cf = load(directory, verify=False)
        out["valid"] = cf is not None
        if cf is not None:
            out["n"] = cf.n
    return out


def table_for(n: int, directory=None, *, threads: int = 1, write: bool = True) -> SpectralTable:
    """Spectral table covering ``n``: from the cache when possible, else built (and saved)."""
    cf = load(directory)
    if cf is not None and cf.n >= n:
        table = cf.to_table()
    else:
        table = build_spectral_table(n, threads)
        if write:
            store(CacheFile.from_table(table), directory)
    install_table(table)
    return table.restrict(n)
