"""Screening of parasitic Raman channels against a signal bandpass.

Every beam traveling through the Raman-active filling gas can scatter
off any populated molecular transition, producing Stokes light at
1/lambda - nu0 or anti-Stokes light at 1/lambda + nu0.  When such a
shifted wavelength lands inside the bandpass that is supposed to isolate
the converted signal, the channel floods the detector with background.
This module ingests a line catalog, shifts every (beam, line) pair in
both directions and ranks the offenders that fall inside the filter.

Catalog files are CSV, UTF-8, with a mandatory header row

    nu0_cm1, e_lower_cm1, rel_strength, band, branch, j_lower

where nu0_cm1 is the transition wavenumber, e_lower_cm1 the lower-state
energy, rel_strength the line strength normalized to the driven
reference transition, band the vibrational label "v'-v", branch one of
O, Q, S and j_lower the lower-state rotational quantum number.  Lines
starting with '#' are comments.  Malformed rows are rejected
individually and reported with their file line number; structural
problems (missing columns, empty file) fail the whole load.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from csrskit.efficiency import LightField

__all__ = [
    "BRANCHES",
    "CATALOG_COLUMNS",
    "CatalogFormatError",
    "RamanLine",
    "BandpassFilter",
    "CatalogDiagnostic",
    "CatalogLoadResult",
    "ParasiticFlag",
    "load_catalog",
    "shifted_wavelengths",
    "screen",
]

BRANCHES = ("O", "Q", "S")
CATALOG_COLUMNS = ("nu0_cm1", "e_lower_cm1", "rel_strength", "band", "branch", "j_lower")


class CatalogFormatError(ValueError):
    """The catalog file as a whole does not conform to the schema."""


@dataclass(frozen=True)
class RamanLine:
    """One molecular transition of the filling gas."""

    nu0_cm1: float
    e_lower_cm1: float
    rel_strength: float
    band: str
    branch: str
    j_lower: int

    def __post_init__(self) -> None:
        if self.nu0_cm1 <= 0:
            raise ValueError("transition wavenumber must be positive")
        if self.e_lower_cm1 < 0:
            raise ValueError("lower-state energy must be non-negative")
        if self.rel_strength <= 0:
            raise ValueError("relative strength must be positive")
        if self.branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}, got {self.branch!r}")
        if self.j_lower < 0:
            raise ValueError("j_lower must be non-negative")

    def label(self) -> str:
        return f"{self.band} {self.branch}({self.j_lower})"


@dataclass(frozen=True)
class BandpassFilter:
    """Signal isolation filter: center wavelength and full width, nm."""

    center_nm: float
    width_nm: float

    def __post_init__(self) -> None:
        if self.center_nm <= 0:
            raise ValueError("center wavelength must be positive")
        if self.width_nm <= 0:
            raise ValueError("filter width must be positive")

    def contains(self, wavelength_nm: float) -> bool:
        half = 0.5 * self.width_nm
        return self.center_nm - half <= wavelength_nm <= self.center_nm + half


@dataclass(frozen=True)
class CatalogDiagnostic:
    line_number: int
    message: str


@dataclass(frozen=True)
class CatalogLoadResult:
    lines: tuple[RamanLine, ...]
    diagnostics: tuple[CatalogDiagnostic, ...]


def load_catalog(path: str | Path) -> CatalogLoadResult:
    """Parse a line-catalog CSV file.

    Returns all well-formed rows in file order together with one
    diagnostic per rejected row.  Raises CatalogFormatError when the
    header is missing or lacks required columns, or the file is empty.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")

    header: list[str] | None = None
    rows: list[tuple[int, list[str]]] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = [cell.strip() for cell in next(csv.reader([raw]))]
        if header is None:
            header = cells
        else:
            rows.append((line_number, cells))

    if header is None:
        raise CatalogFormatError(f"{path}: empty catalog (no header row)")
    if tuple(header) != CATALOG_COLUMNS:
        missing = [c for c in CATALOG_COLUMNS if c not in header]
        if missing:
            raise CatalogFormatError(f"{path}: header misses required columns {missing}")
        raise CatalogFormatError(
            f"{path}: header columns must be exactly {list(CATALOG_COLUMNS)}, got {header}"
        )

    lines: list[RamanLine] = []
    diagnostics: list[CatalogDiagnostic] = []
    for line_number, cells in rows:
        if len(cells) != len(CATALOG_COLUMNS):
            diagnostics.append(
                CatalogDiagnostic(line_number, f"expected {len(CATALOG_COLUMNS)} fields, got {len(cells)}")
            )
            continue
        try:
            line = RamanLine(
                nu0_cm1=float(cells[0]),
                e_lower_cm1=float(cells[1]),
                rel_strength=float(cells[2]),
                band=cells[3],
                branch=cells[4],
                j_lower=int(cells[5]),
            )
        except ValueError as exc:
            diagnostics.append(CatalogDiagnostic(line_number, str(exc)))
            continue
        lines.append(line)
    return CatalogLoadResult(lines=tuple(lines), diagnostics=tuple(diagnostics))


def shifted_wavelengths(pump_nm: float, line: RamanLine) -> tuple[float | None, float]:
    """Stokes and anti-Stokes wavelengths of a beam scattered off a line.

    1/lambda_stokes = 1/lambda - nu0 and 1/lambda_antistokes =
    1/lambda + nu0 in vacuum wavenumbers; the Stokes entry is None when
    the shift exceeds the photon energy.
    """
    if pump_nm <= 0:
        raise ValueError("wavelength must be positive")
    inv_nm = 1.0 / pump_nm
    shift_nm = line.nu0_cm1 * 1e-7
    inv_stokes = inv_nm - shift_nm
    stokes = 1.0 / inv_stokes if inv_stokes > 0 else None
    antistokes = 1.0 / (inv_nm + shift_nm)
    return stokes, antistokes


@dataclass(frozen=True)
class ParasiticFlag:
    """One offending (beam, line, direction) combination."""

    source: str
    source_nm: float
    line: RamanLine
    direction: str  # "stokes" | "anti-stokes"
    wavelength_nm: float
    offset_nm: float  # landing wavelength minus band center
    #: energy (cm^-1) of the state the scattering starts from; de-excitation
    #: (anti-Stokes) channels exist only given population there
    population_state_cm1: float | None


def screen(
    pumps: list[LightField],
    probe: LightField,
    catalog: CatalogLoadResult | tuple[RamanLine, ...] | list[RamanLine],
    bandpass: BandpassFilter,
    strength_threshold: float = 0.01,
) -> list[ParasiticFlag]:
    """Rank catalog channels that land inside the signal bandpass.

    Both pumps and the probe are screened in both shift directions.
    Flags require rel_strength >= strength_threshold and are sorted by
    strength descending, then transition wavenumber ascending.
    """
    lines = catalog.lines if isinstance(catalog, CatalogLoadResult) else tuple(catalog)
    sources = [(f"pump{i}", f.wavelength_nm) for i, f in enumerate(pumps, start=1)]
    sources.append(("probe", probe.wavelength_nm))

    flags: list[ParasiticFlag] = []
    for source_name, source_nm in sources:
        for line in lines:
            if line.rel_strength < strength_threshold:
                continue
            stokes, antistokes = shifted_wavelengths(source_nm, line)
            candidates = [
                ("stokes", stokes, line.e_lower_cm1),
                ("anti-stokes", antistokes, line.e_lower_cm1 + line.nu0_cm1),
            ]
            for direction, lam, initial_state in candidates:
                if lam is None or not bandpass.contains(lam):
                    continue
                flags.append(
                    ParasiticFlag(
                        source=source_name,
                        source_nm=source_nm,
                        line=line,
                        direction=direction,
                        wavelength_nm=lam,
                        offset_nm=lam - bandpass.center_nm,
                        population_state_cm1=initial_state if direction == "anti-stokes" else None,
                    )
                )
    flags.sort(key=lambda f: (-f.line.rel_strength, f.line.nu0_cm1, f.source, f.direction))
    return flags
