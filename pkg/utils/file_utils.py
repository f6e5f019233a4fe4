import csv
import json
import math
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from config.settings import settings
from core.exceptions import InvalidInput
from geometry.projection import EquirectPoint
from tracking.tracker import Detection, ObjectTrack

PredictionRow = Tuple[int, int, float, float, float, float, Optional[float]]


def _format(value: Any) -> str:
    """Deterministic, lossless cell formatting."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class FileUtils:
    """Utility class for reading and writing pipeline artifacts."""

    @staticmethod
    def ensure_directory(directory: str) -> bool:
        """
        Ensure directory exists, create if it doesn't.

        Args:
            directory: Directory path to ensure

        Returns:
            True if directory exists or was created, False otherwise
        """
        try:
            os.makedirs(directory, exist_ok=True)
            return True
        except (OSError, PermissionError):
            return False

    @staticmethod
    def write_csv(filepath: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        """
        Write a CSV file with a header row.

        Args:
            filepath: Path to write the file to
            header: Column names
            rows: Data rows

        Returns:
            filepath
        """
        directory = os.path.dirname(filepath)
        if directory and not FileUtils.ensure_directory(directory):
            raise InvalidInput(f"cannot create output directory {directory}")
        try:
            with open(filepath, 'w', encoding='utf-8', newline='') as f:
                writer = csv.writer(f, lineterminator='\n')
                writer.writerow(header)
                for row in rows:
                    writer.writerow([_format(value) for value in row])
        except OSError as e:
            raise InvalidInput(f"cannot write {filepath}: {e}")
        return filepath

    @staticmethod
    def write_json(filepath: str, payload: Dict[str, Any]) -> str:
        """Write JSON with sorted keys so identical payloads give identical bytes."""
        directory = os.path.dirname(filepath)
        if directory and not FileUtils.ensure_directory(directory):
            raise InvalidInput(f"cannot create output directory {directory}")
        try:
            with open(filepath, 'w', encoding='utf-8') as f:
                json.dump(payload, f, indent=2, sort_keys=True)
                f.write('\n')
        except OSError as e:
            raise InvalidInput(f"cannot write {filepath}: {e}")
        return filepath

    @staticmethod
    def read_csv(filepath: str, required: Sequence[str]) -> List[Dict[str, str]]:
        """
        Read a CSV file into dictionaries.

        Args:
            filepath: Path to the file
            required: Columns that must be present

        Returns:
            One dictionary per data row

        Raises:
            InvalidInput: if the file is missing or lacks a required column
        """
        if not os.path.isfile(filepath):
            raise InvalidInput(f"file not found: {filepath}")
        with open(filepath, 'r', encoding='utf-8', newline='') as f:
            reader = csv.DictReader(f)
            missing = [column for column in required if column not in (reader.fieldnames or [])]
            if missing:
                raise InvalidInput(f"{filepath} is missing columns: {', '.join(missing)}")
            return list(reader)

    @staticmethod
    def _number(row: Dict[str, str], column: str, filepath: str, cast=float):
        try:
            value = cast(row[column])
        except (TypeError, ValueError):
            raise InvalidInput(f"{filepath}: bad value {row.get(column)!r} in column {column}")
        if isinstance(value, float) and not math.isfinite(value):
            raise InvalidInput(f"{filepath}: non-finite value {row[column]!r} in column {column}")
        return value

    # Detections: frame,x_min,y_min,x_max,y_max,wrap

    @staticmethod
    def read_detections(filepath: str) -> List[Detection]:
        rows = FileUtils.read_csv(filepath, settings.DETECTIONS_HEADER[:5])
        detections = []
        for row in rows:
            wrap = str(row.get('wrap', '0')).strip().lower() in ('1', 'true', 'yes')
            detections.append(Detection(
                frame=FileUtils._number(row, 'frame', filepath, int),
                x_min=FileUtils._number(row, 'x_min', filepath),
                y_min=FileUtils._number(row, 'y_min', filepath),
                x_max=FileUtils._number(row, 'x_max', filepath),
                y_max=FileUtils._number(row, 'y_max', filepath),
                wrap=wrap,
            ))
        return detections

    @staticmethod
    def write_detections(filepath: str, detections: Iterable[Detection]) -> str:
        rows = ((d.frame, d.x_min, d.y_min, d.x_max, d.y_max, d.wrap) for d in detections)
        return FileUtils.write_csv(filepath, settings.DETECTIONS_HEADER, rows)

    # Trajectories: frame,object_id,cx,cy

    @staticmethod
    def trajectory_rows(tracks: Iterable[ObjectTrack]) -> List[Tuple[int, int, float, float]]:
        """Tracks flattened to rows sorted by (frame, object_id)."""
        rows = [(frame, track.id, float(p.x), float(p.y)) for track in tracks for frame, p in track.points]
        return sorted(rows, key=lambda row: (row[0], row[1]))

    @staticmethod
    def read_trajectories(filepath: str) -> List[Tuple[int, int, float, float]]:
        rows = FileUtils.read_csv(filepath, settings.TRAJECTORIES_HEADER)
        return [(
            FileUtils._number(row, 'frame', filepath, int),
            FileUtils._number(row, 'object_id', filepath, int),
            FileUtils._number(row, 'cx', filepath),
            FileUtils._number(row, 'cy', filepath),
        ) for row in rows]

    # Viewports: frame,x,y

    @staticmethod
    def write_viewports(filepath: str, viewports: Sequence[EquirectPoint]) -> str:
        rows = ((frame, float(v.x), float(v.y)) for frame, v in enumerate(viewports))
        return FileUtils.write_csv(filepath, settings.VIEWPORTS_HEADER, rows)

    @staticmethod
    def read_viewports(filepath: str) -> List[EquirectPoint]:
        """Per-frame viewports; frames must be 0..n-1 in order."""
        rows = FileUtils.read_csv(filepath, settings.VIEWPORTS_HEADER)
        viewports = []
        for expected, row in enumerate(rows):
            frame = FileUtils._number(row, 'frame', filepath, int)
            if frame != expected:
                raise InvalidInput(f"{filepath}: expected frame {expected}, found {frame}")
            viewports.append(EquirectPoint(
                x=FileUtils._number(row, 'x', filepath), y=FileUtils._number(row, 'y', filepath)))
        return viewports

    # Predictions: chunk,frame,pred_x,pred_y,actual_x,actual_y,obj_contrib

    @staticmethod
    def read_predictions(filepath: str) -> List[PredictionRow]:
        rows = FileUtils.read_csv(filepath, settings.PREDICTIONS_HEADER)
        parsed = []
        for row in rows:
            contribution = row['obj_contrib'].strip()
            parsed.append((
                FileUtils._number(row, 'chunk', filepath, int),
                FileUtils._number(row, 'frame', filepath, int),
                FileUtils._number(row, 'pred_x', filepath),
                FileUtils._number(row, 'pred_y', filepath),
                FileUtils._number(row, 'actual_x', filepath),
                FileUtils._number(row, 'actual_y', filepath),
                float(contribution) if contribution else None,
            ))
        return parsed

    # Allocations: chunk,row,col,bitrate_mbps

    @staticmethod
    def read_allocations(filepath: str) -> List[Tuple[int, int, int, float]]:
        rows = FileUtils.read_csv(filepath, settings.ALLOCATIONS_HEADER)
        return [(
            FileUtils._number(row, 'chunk', filepath, int),
            FileUtils._number(row, 'row', filepath, int),
            FileUtils._number(row, 'col', filepath, int),
            FileUtils._number(row, 'bitrate_mbps', filepath),
        ) for row in rows]
