"""Space-time diagrams, time going downward."""

from pathlib import Path

import numpy as np

from app.core.logger import logger
from app.schemas.report import Trajectory
from app.schemas.ring import Configuration

WHITE, GRAY, BLACK = 255, 192, 0


def _rows(trajectory: Trajectory) -> list[tuple[bool, Configuration]]:
    """(is_substep, configuration) in display order."""
    rows: list[tuple[bool, Configuration]] = []
    for t, cfg in enumerate(trajectory.steps):
        rows.append((False, cfg))
        if trajectory.substeps is not None and t < len(trajectory.substeps):
            # the last substep is the next step row
            rows.extend((True, sub) for sub in trajectory.substeps[t][:-1])
    return rows


def render_text(trajectory: Trajectory, one: str = "#", zero: str = ".") -> str:
    show_substeps = trajectory.substeps is not None
    lines = []
    for is_substep, cfg in _rows(trajectory):
        body = "".join(one if bit else zero for bit in cfg.bits)
        if show_substeps:
            body = (":" if is_substep else " ") + body
        lines.append(body)
    return "\n".join(lines) + "\n"


def render_pgm(trajectory: Trajectory) -> str:
    """Plain P2 graymap; substep rows draw ones in light gray."""
    rows = _rows(trajectory)
    image = np.full((len(rows), trajectory.steps[0].n), WHITE, dtype=np.int64)
    for y, (is_substep, cfg) in enumerate(rows):
        image[y, cfg.to_array() == 1] = GRAY if is_substep else BLACK
    header = f"P2\n{image.shape[1]} {image.shape[0]}\n{WHITE}\n"
    return header + "\n".join(" ".join(str(v) for v in row) for row in image) + "\n"


def write_diagram(path: Path | str, trajectory: Trajectory) -> Path:
    path = Path(path)
    content = render_pgm(trajectory) if path.suffix.lower() == ".pgm" else render_text(trajectory)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="ascii")
    logger.info(f"Diagram written to {path}")
    return path
