"""Reference records, the threshold-keyed catalog and its text file format.

Catalog file (UTF-8, LF)::

    # soleidx-catalog v1
    id<TAB>tau<TAB>t<TAB>levels<TAB>width<TAB>height<TAB>sha256<TAB>brand<TAB>created_at

``tau`` has exactly six decimals and ``created_at`` is ``YYYY-MM-DDThh:mm:ssZ``.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from pathlib import Path

from .enhance import equalize
from .errors import DuplicateId, InvalidQuery, InvalidRecord, MalformedCatalog, ParameterError
from .fileio import atomic_write
from .imagecore import GrayImage, decode_image
from .restore import BlurKernel, RestorationParams, restore
from .segment import OtsuResult, format_tau, global_threshold_index

CATALOG_VERSION = 1
CATALOG_HEADER = f"# soleidx-catalog v{CATALOG_VERSION}"

_ID_RE = re.compile(r"[^\s]+")
_TAU_RE = re.compile(r"[0-9]\.[0-9]{6}")
_INT_RE = re.compile(r"0|[1-9][0-9]*")
_DIGEST_RE = re.compile(r"[0-9a-f]{64}")
_STAMP_RE = re.compile(r"[0-9]{4}-[0-9]{2}-[0-9]{2}T[0-9]{2}:[0-9]{2}:[0-9]{2}Z")
_STAMP_FMT = "%Y-%m-%dT%H:%M:%SZ"


def format_timestamp(when: datetime | None = None) -> str:
    """UTC, seconds precision, ``Z`` suffix. Naive datetimes are taken as UTC."""
    when = when or datetime.now(timezone.utc)
    if when.tzinfo is not None:
        when = when.astimezone(timezone.utc)
    return when.strftime(_STAMP_FMT)


def parse_timestamp(text: str) -> str:
    """Validate a ``YYYY-MM-DDThh:mm:ssZ`` stamp and return it unchanged."""
    if not _STAMP_RE.fullmatch(text):
        raise ValueError(f"timestamp must look like 2024-01-31T12:00:00Z, got {text!r}")
    datetime.strptime(text, _STAMP_FMT)  # rejects month 13 etc.
    return text


@dataclass(frozen=True)
class IndexRecord:
    id: str
    tau: str
    t: int
    levels: int
    width: int
    height: int
    source_digest: str
    brand: str
    created_at: str

    def __post_init__(self):
        if not _ID_RE.fullmatch(self.id):
            raise InvalidRecord(f"id must be a non-empty token without whitespace: {self.id!r}")
        if any(ch in self.brand for ch in "\t\n\r"):
            raise InvalidRecord("brand may not contain tabs or line breaks")
        if not _DIGEST_RE.fullmatch(self.source_digest):
            raise InvalidRecord(f"source_digest must be 64 lowercase hex chars: {self.source_digest!r}")
        if self.levels < 2 or not 0 <= self.t <= self.levels - 2:
            raise InvalidRecord(f"threshold {self.t} invalid for {self.levels} levels")
        if self.width < 1 or self.height < 1:
            raise InvalidRecord(f"invalid dimensions {self.width}x{self.height}")
        if self.tau != format_tau(self.t, self.levels):
            raise InvalidRecord(f"tau {self.tau} does not match t={self.t}, levels={self.levels}")
        try:
            parse_timestamp(self.created_at)
        except ValueError as exc:
            raise InvalidRecord(str(exc)) from None

    @property
    def tau_value(self) -> Decimal:
        return Decimal(self.tau)

    def to_line(self) -> str:
        return "\t".join(
            (self.id, self.tau, str(self.t), str(self.levels), str(self.width),
             str(self.height), self.source_digest, self.brand, self.created_at)
        )

    @classmethod
    def from_line(cls, line: str) -> IndexRecord:
        fields = line.split("\t")
        if len(fields) != 9:
            raise MalformedCatalog(f"expected 9 tab-separated fields, got {len(fields)}")
        rid, tau, t, levels, width, height, digest, brand, created = fields
        if not _TAU_RE.fullmatch(tau):
            raise MalformedCatalog(f"unparseable tau {tau!r}")
        for name, value in (("t", t), ("levels", levels), ("width", width), ("height", height)):
            if not _INT_RE.fullmatch(value):
                raise MalformedCatalog(f"{name} is not a canonical integer: {value!r}")
        try:
            return cls(rid, tau, int(t), int(levels), int(width), int(height), digest, brand, created)
        except InvalidRecord as exc:
            raise MalformedCatalog(str(exc)) from None


@dataclass(frozen=True)
class Catalog:
    records: tuple[IndexRecord, ...] = ()
    version: int = field(default=CATALOG_VERSION)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for rec in self.records:
            if rec.id in seen:
                raise DuplicateId(f"id {rec.id!r} appears twice")
            seen.add(rec.id)

    def __len__(self):
        return len(self.records)

    def __contains__(self, record_id: str) -> bool:
        return any(r.id == record_id for r in self.records)

    def get(self, record_id: str) -> IndexRecord | None:
        return next((r for r in self.records if r.id == record_id), None)


def add_record(cat: Catalog, rec: IndexRecord) -> Catalog:
    if rec.id in cat:
        raise DuplicateId(f"id {rec.id!r} already in catalog")
    return Catalog(cat.records + (rec,), cat.version)


def _as_decimal(value, name: str) -> Decimal:
    # str() first so a float like 0.47 becomes Decimal('0.47'), not its binary expansion
    try:
        d = Decimal(str(value))
    except InvalidOperation:
        raise InvalidQuery(f"{name} is not a number: {value!r}") from None
    if not d.is_finite():
        raise InvalidQuery(f"{name} must be finite")
    return d


def query_range(cat: Catalog, tau_q, tol) -> list[IndexRecord]:
    """Records with ``|tau - tau_q| <= tol``, nearest first, ties by id.

    Distances are exact decimal arithmetic on the six-decimal stored tau,
    so answers match what the file on disk says.
    """
    q = _as_decimal(tau_q, "tau")
    tolerance = _as_decimal(tol, "tol")
    if not 0 <= q <= 1:
        raise InvalidQuery(f"tau must lie in [0, 1], got {tau_q}")
    if tolerance < 0:
        raise InvalidQuery(f"tol must be >= 0, got {tol}")
    hits = [(abs(r.tau_value - q), r.id, r) for r in cat.records]
    hits = [h for h in hits if h[0] <= tolerance]
    hits.sort(key=lambda h: (h[0], h[1]))
    return [r for _, _, r in hits]


def save_catalog(cat: Catalog) -> bytes:
    lines = [CATALOG_HEADER] + [r.to_line() for r in cat.records]
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_catalog(data: bytes) -> Catalog:
    try:
        text = bytes(data).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedCatalog(f"not UTF-8: {exc}") from None
    if not text.endswith("\n"):
        raise MalformedCatalog("catalog must end with a newline")
    lines = text[:-1].split("\n")
    if lines[0] != CATALOG_HEADER:
        raise MalformedCatalog(f"bad header {lines[0]!r}; expected {CATALOG_HEADER!r}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            records.append(IndexRecord.from_line(line))
        except MalformedCatalog as exc:
            raise MalformedCatalog(f"line {lineno}: {exc}") from None
    try:
        return Catalog(tuple(records))
    except DuplicateId as exc:
        raise MalformedCatalog(str(exc)) from None


def read_catalog_file(path) -> Catalog:
    """Load a catalog file; a missing file is an empty catalog."""
    path = Path(path)
    if not path.exists():
        return Catalog()
    return load_catalog(path.read_bytes())


def write_catalog_file(path, cat: Catalog) -> None:
    atomic_write(path, save_catalog(cat))


@dataclass(frozen=True)
class PipelineResult:
    """Every intermediate of a pipeline run, for stage summaries and figure dumps."""

    gray: GrayImage
    enhanced: GrayImage
    restored: GrayImage | None
    otsu: OtsuResult

    @property
    def segmented_input(self) -> GrayImage:
        return self.restored if self.restored is not None else self.enhanced


def run_pipeline(
    image_bytes: bytes,
    params: RestorationParams | None = None,
    psf: BlurKernel | None = None,
) -> PipelineResult:
    """decode -> grayscale -> equalize -> [restore] -> Otsu."""
    if (params is None) != (psf is None):
        raise ParameterError("restoration needs both params and a psf")
    gray = decode_image(image_bytes)
    enhanced = equalize(gray)
    restored = restore(enhanced, psf, params) if params is not None else None
    otsu = global_threshold_index(restored if restored is not None else enhanced)
    return PipelineResult(gray, enhanced, restored, otsu)


def ingest(
    image_bytes: bytes,
    record_id: str,
    brand: str = "",
    params: RestorationParams | None = None,
    psf: BlurKernel | None = None,
    *,
    catalog: Catalog | None = None,
    created_at: str | datetime | None = None,
) -> IndexRecord:
    """Run the pipeline on one reference image and build its catalog record."""
    if catalog is not None and record_id in catalog:
        raise DuplicateId(f"id {record_id!r} already in catalog")
    stamp = parse_timestamp(created_at) if isinstance(created_at, str) else format_timestamp(created_at)
    result = run_pipeline(image_bytes, params, psf)
    return make_record(result, image_bytes, record_id, brand, stamp)


def make_record(result: PipelineResult, image_bytes: bytes, record_id: str, brand: str,
                created_at: str) -> IndexRecord:
    img = result.segmented_input
    return IndexRecord(
        id=record_id,
        tau=result.otsu.tau_str,
        t=result.otsu.t,
        levels=result.otsu.levels,
        width=img.width,
        height=img.height,
        source_digest=hashlib.sha256(bytes(image_bytes)).hexdigest(),
        brand=brand,
        created_at=created_at,
    )
