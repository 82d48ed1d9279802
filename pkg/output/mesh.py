"""Wavefront OBJ text for chord disks"""
import sys
from pathlib import Path
from typing import Dict, List

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.utils import format_float


def disk_to_obj(disk, include_degenerate: bool = False) -> str:
    """Shared vertices, one face per fan triangle; degenerate triangles skipped unless asked"""
    index: Dict[tuple, int] = {}
    verts: List[tuple] = []
    faces = []
    for tri, flat in zip(disk.triangles, disk.degenerate):
        if flat and not include_degenerate:
            continue
        face = []
        for p in tri:
            if p not in index:
                index[p] = len(verts) + 1
                verts.append(p)
            face.append(index[p])
        faces.append(face)
    lines = [f"# chord disk, apex component {disk.apex.component} edge {disk.apex.edge}"]
    lines += ["v " + " ".join(format_float(float(c)) for c in p) for p in verts]
    lines += ["f " + " ".join(str(i) for i in f) for f in faces]
    return "\n".join(lines) + "\n"


def write_obj(disk, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(disk_to_obj(disk), encoding="utf-8")
    return path
