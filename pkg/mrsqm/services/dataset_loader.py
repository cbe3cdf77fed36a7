import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from mrsqm.core.errors import DatasetFormatError, DatasetParseError
from mrsqm.models.enums import LabelColumn
from mrsqm.schemas.dataset import TimeSeriesDataset

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _class_index(labels: List[str], declared: Optional[List[str]] = None) -> Dict[str, int]:
    """Contiguous class codes in declaration order, else first appearance in the data."""
    order = list(declared) if declared else []
    for i, label in enumerate(order):
        if label in order[:i]:
            raise DatasetFormatError(f"Label {label!r} is declared twice by @classLabel")
    for label in labels:
        if label not in order:
            if declared:
                raise DatasetFormatError(f"Label {label!r} is not declared by @classLabel")
            order.append(label)
    return {label: i for i, label in enumerate(order)}


def _read_lines(path: Path) -> List[str]:
    with open(path, "r", encoding="utf-8") as f:
        try:
            return f.readlines()
        except UnicodeDecodeError as e:
            raise DatasetParseError(f"{path}: not UTF-8 text ({e.reason})")


def _parse_values(text: str, line_number: int) -> np.ndarray:
    fields = text.split(",")
    try:
        values = np.array(fields, dtype=np.float64)
    except ValueError:
        bad = next(f for f in fields if not _is_number(f))
        raise DatasetParseError(f"Line {line_number}: non-numeric value {bad.strip()!r}")
    if not np.all(np.isfinite(values)):
        raise DatasetParseError(f"Line {line_number}: NaN or infinite value")
    return values


def _is_number(field: str) -> bool:
    try:
        float(field)
        return True
    except ValueError:
        return False


def _parse_directive(line: str) -> Tuple[str, List[str]]:
    parts = line.split()
    return parts[0][1:].lower(), parts[1:]


def load_ts(path: PathLike) -> TimeSeriesDataset:
    """
    Load a univariate UCR/UEA ``.ts`` file.

    Args:
        path: File with ``@`` directives, an ``@data`` line, then one
            ``v1,...,vL:label`` line per series (no ``:label`` when the header
            says ``@classLabel false``)

    Returns:
        The parsed dataset
    """
    path = Path(path)
    declared: Optional[List[str]] = None
    labeled = True
    in_data = False
    rows: List[np.ndarray] = []
    labels: List[str] = []
    name = path.stem

    for line_number, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue

        if not in_data:
            if not line.startswith("@"):
                raise DatasetFormatError(f"Line {line_number}: data before @data directive")
            directive, args = _parse_directive(line)
            if directive == "data":
                in_data = True
            elif directive == "problemname" and args:
                name = args[0]
            elif directive == "univariate" and args and args[0].lower() == "false":
                raise DatasetFormatError("Multivariate .ts files are not supported")
            elif directive == "classlabel":
                if args and args[0].lower() == "true":
                    declared = args[1:] or None
                elif args and args[0].lower() == "false":
                    labeled = False
            continue

        if labeled:
            if ":" not in line:
                raise DatasetFormatError(f"Line {line_number}: missing ':label'")
            values_text, label = line.rsplit(":", 1)
            labels.append(label.strip())
        else:
            values_text = line
        if ":" in values_text:
            raise DatasetFormatError(
                f"Line {line_number}: multiple dimensions are not supported"
            )

        values = _parse_values(values_text, line_number)
        if rows and len(values) != len(rows[0]):
            raise DatasetFormatError(
                f"Line {line_number}: ragged series of length {len(values)}, "
                f"expected {len(rows[0])}"
            )
        rows.append(values)

    if not in_data:
        raise DatasetFormatError(f"{path}: missing @data directive")
    if not rows:
        raise DatasetFormatError(f"{path}: no data lines")

    dataset = TimeSeriesDataset(
        X=np.vstack(rows),
        labels=labels if labeled else None,
        class_index=_class_index(labels, declared) if labeled else {},
        name=name,
    )
    logger.info(f"Loaded {path}: N={dataset.N}, L={dataset.L}, C={dataset.C}")
    return dataset


def load_csv(
    path: PathLike,
    label_column: Union[LabelColumn, str] = LabelColumn.FIRST,
    header: bool = False,
) -> TimeSeriesDataset:
    """
    Load a headerless CSV file with one series per row and a label column.

    Args:
        path: CSV file path
        label_column: Whether the label is the first or the last column
        header: Skip the first line

    Returns:
        The parsed dataset
    """
    path = Path(path)
    label_column = LabelColumn(label_column)
    skip = 1 if header else 0

    try:
        frame = pd.read_csv(
            path,
            header=None,
            skiprows=skip,
            dtype=str,
            na_filter=False,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        raise DatasetFormatError(f"{path}: empty file")
    except pd.errors.ParserError as e:
        raise DatasetFormatError(f"{path}: ragged rows ({str(e).strip()})")
    except UnicodeDecodeError as e:
        raise DatasetParseError(f"{path}: not UTF-8 text ({e.reason})")

    if frame.shape[1] < 2:
        raise DatasetFormatError(f"{path}: need a label column and at least one value column")

    ragged = frame.isna().any(axis=1).to_numpy()
    if ragged.any():
        line_number = int(np.argmax(ragged)) + 1 + skip
        raise DatasetFormatError(
            f"Line {line_number}: ragged row, expected {frame.shape[1]} columns"
        )

    if label_column == LabelColumn.FIRST:
        labels_col, values = frame.iloc[:, 0], frame.iloc[:, 1:]
    else:
        labels_col, values = frame.iloc[:, -1], frame.iloc[:, :-1]

    numeric = values.apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce"))
    invalid = numeric.isna().to_numpy()
    X = numeric.to_numpy(dtype=np.float64)
    invalid |= ~np.isfinite(X)
    if invalid.any():
        row, col = np.argwhere(invalid)[0]
        raise DatasetParseError(
            f"Line {row + 1 + skip}: non-numeric value {values.iat[row, col].strip()!r}"
        )

    labels = [str(label).strip() for label in labels_col]
    dataset = TimeSeriesDataset(
        X=X,
        labels=labels,
        class_index=_class_index(labels),
        name=path.stem,
    )
    logger.info(f"Loaded {path}: N={dataset.N}, L={dataset.L}, C={dataset.C}")
    return dataset


def load_dataset(
    path: PathLike,
    label_column: Union[LabelColumn, str] = LabelColumn.FIRST,
    header: bool = False,
) -> TimeSeriesDataset:
    """Load a ``.csv`` file with load_csv and anything else as ``.ts``."""
    if Path(path).suffix.lower() == ".csv":
        return load_csv(path, label_column=label_column, header=header)
    return load_ts(path)


def save_ts(dataset: TimeSeriesDataset, path: PathLike, problem_name: Optional[str] = None) -> str:
    """
    Write a dataset as a univariate ``.ts`` file.

    Values use Python's shortest round-trip float representation, so
    load_ts reproduces them exactly.
    """
    path = Path(path)
    problem_name = problem_name or dataset.name or path.stem
    lines = [
        f"@problemName {problem_name}",
        "@timeStamps false",
        "@univariate true",
        "@equalLength true",
        f"@seriesLength {dataset.L}",
    ]
    if dataset.is_labeled:
        lines.append("@classLabel true " + " ".join(dataset.class_names))
    else:
        lines.append("@classLabel false")
    lines.append("@data")

    for i, row in enumerate(dataset.X):
        values = ",".join(repr(float(v)) for v in row)
        lines.append(f"{values}:{dataset.labels[i]}" if dataset.is_labeled else values)

    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    logger.info(f"Wrote {dataset.N} series to {path}")
    return str(path)
