import os
import hashlib
import json
import time
from typing import Any, Dict, Optional, Union

import pandas as pd


class WorkspaceError(Exception):
    pass


class ArtifactWorkspace:
    """
    Manages the run's output directory.
    Strictly enforces that every artifact lives directly under it.
    """

    REPORT_NAME = "run_report.json"

    def __init__(self, out_dir: str):
        if not out_dir:
            raise WorkspaceError("Invalid output directory")
        self.root = os.path.abspath(out_dir)

    def init_workspace(self) -> str:
        """Creates the output directory."""
        os.makedirs(self.root, exist_ok=True)
        return self.root

    def get_file_path(self, filename: str) -> str:
        """
        Returns the ABSOLUTE PHYSICAL PATH to an artifact in the workspace.
        Use this when passing files to loaders that require a path string.
        """
        target_path = os.path.abspath(os.path.join(self.root, filename))

        # Path Traversal Guard
        if os.path.dirname(target_path) != self.root:
            raise WorkspaceError(f"Path traversal attempt detected: {filename}")
        return target_path

    def exists(self, filename: str) -> bool:
        return os.path.exists(self.get_file_path(filename))

    @staticmethod
    def calculate_checksum(file_path: str) -> str:
        """Generates SHA256 hash for integrity verification."""
        sha256_hash = hashlib.sha256()
        with open(file_path, "rb") as f:
            for byte_block in iter(lambda: f.read(4096), b""):
                sha256_hash.update(byte_block)
        return sha256_hash.hexdigest()

    def save_file(self, filename: str, content: Union[str, bytes]) -> Dict[str, Any]:
        """
        Saves an artifact to the workspace.
        Performs atomic write to prevent partial corruption.
        """
        self.init_workspace()
        target_path = self.get_file_path(filename)
        temp_path = f"{target_path}.tmp"

        try:
            # 1. Write to .tmp file
            if isinstance(content, bytes):
                with open(temp_path, "wb") as f:
                    f.write(content)
            else:
                with open(temp_path, "w", encoding="utf-8") as f:
                    f.write(content)

            # 2. Atomic Rename
            os.replace(temp_path, target_path)

            # 3. Calculate Integrity Hash
            return {
                "status": "success",
                "path": target_path,
                "checksum": self.calculate_checksum(target_path),
                "timestamp": time.time(),
            }
        except Exception:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise

    def save_frame(self, filename: str, frame: pd.DataFrame) -> Dict[str, Any]:
        return self.save_file(filename, frame.to_csv(index=False))

    def get_file(self, filename: str) -> Optional[str]:
        """Reads an artifact from the workspace, or None when it is missing."""
        target_path = self.get_file_path(filename)
        if not os.path.exists(target_path):
            return None
        with open(target_path, "r", encoding="utf-8") as f:
            return f.read()

    def require(self, filename: str, produced_by: str) -> str:
        """Path of an artifact an earlier stage must have written."""
        path = self.get_file_path(filename)
        if not os.path.exists(path):
            raise WorkspaceError(f"Missing '{filename}' in {self.root}; run '{produced_by}' first.")
        return path

    # --- run report ---
    def load_report(self) -> Dict[str, Any]:
        content = self.get_file(self.REPORT_NAME)
        return json.loads(content) if content else {}

    def update_report(self, section: str, payload: Dict[str, Any]) -> Dict[str, Any]:
        """Merges one stage section into run_report.json."""
        report = self.load_report()
        report[section] = payload
        self.save_file(self.REPORT_NAME, json.dumps(report, indent=2, sort_keys=True, default=_json_default))
        return report


def _json_default(value):
    if hasattr(value, "item"):
        return value.item()
    if hasattr(value, "tolist"):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")
