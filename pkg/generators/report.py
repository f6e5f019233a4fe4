import os
from typing import Any, Dict, Iterable, List, Optional, Sequence

from config.settings import settings
from utils.file_utils import FileUtils


class ReportGenerator:
    """Writes run artifacts into one output directory and records them in a manifest."""

    def __init__(self, out_dir: str = settings.DEFAULT_OUTPUT_DIR, schema_version: str = settings.SCHEMA_VERSION):
        self.out_dir = out_dir
        self.schema_version = schema_version
        self.artifacts: List[Dict[str, str]] = []

    def path(self, filename: str) -> str:
        return os.path.join(self.out_dir, filename)

    def record_artifact(self, filename: str, kind: str) -> str:
        self.artifacts = [a for a in self.artifacts if a['file'] != filename]
        self.artifacts.append({'file': filename, 'kind': kind, 'schema_version': self.schema_version})
        return self.path(filename)

    def write_csv_artifact(self, filename: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        """
        Write a CSV artifact.

        Args:
            filename: File name inside the output directory
            header: Column names
            rows: Data rows

        Returns:
            Path of the written file
        """
        FileUtils.write_csv(self.path(filename), header, rows)
        return self.record_artifact(filename, 'csv')

    def write_json_artifact(self, filename: str, payload: Dict[str, Any]) -> str:
        """Write a JSON artifact with the schema version added."""
        FileUtils.write_json(self.path(filename), {'schema_version': self.schema_version, **payload})
        return self.record_artifact(filename, 'json')

    def manifest(self, command: str, config: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        return {
            'schema_version': self.schema_version,
            'command': command,
            'out_dir': self.out_dir,
            'artifacts': sorted(self.artifacts, key=lambda a: a['file']),
            'config': config or {},
        }

    def write_manifest(self, command: str, config: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        Write manifest.json listing every artifact written so far.

        No timestamps are recorded, so reruns give identical bytes.

        Returns:
            The manifest payload
        """
        payload = self.manifest(command, config)
        FileUtils.write_json(self.path(settings.MANIFEST_FILE), payload)
        return payload
