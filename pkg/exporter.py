"""
TOBL Correlation Toolkit - Export Module
Handles exporting behaviors, decompositions and local models to JSON, CSV and Excel
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd

from config import OUTPUT_DIR, TABLE_FORMATS
from formats import format_rational, write_json
from models import (Behavior, Bipartition, Direction, LocalModel, OneWayPairStrategy,
                    ToblDecomposition)

logger = logging.getLogger(__name__)


def _letter(party: int) -> str:
    return chr(ord('a') + party) if party < 26 else f"p{party + 1}_"


def _digits(*values: int) -> str:
    return ''.join(str(v) for v in values)


def sheet_name(bipartition: Bipartition, direction: Direction) -> str:
    return f"{bipartition.label.replace('|', '-')} {direction.value}"


class ResultExporter:
    """Export results to JSON files and decomposition tables"""

    def __init__(self, output_dir: Union[str, Path, None] = None):
        self.output_dir = Path(output_dir or OUTPUT_DIR)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def export_json(self, name: str, payload: Any) -> Path:
        filepath = write_json(self.output_dir / f"{name}.json", payload)
        logger.info(f"Exported {name} to {filepath}")
        return filepath

    # --- frames ---------------------------------------------------------------

    def behavior_frame(self, behavior: Behavior) -> pd.DataFrame:
        """Input tuples as rows, output tuples as columns"""
        scenario = behavior.scenario
        columns = [_digits(*a) for a in scenario.output_tuples]
        rows = {_digits(*x): [format_rational(behavior.table[(x, a)]) for a in scenario.output_tuples]
                for x in scenario.input_tuples}
        frame = pd.DataFrame.from_dict(rows, orient='index', columns=columns)
        frame.index.name = ''.join(f"x{p + 1}" for p in range(scenario.parties))
        return frame

    def _pair_columns(self, strategy: OneWayPairStrategy, j: int, k: int) -> Dict[str, int]:
        m_j, m_k = strategy.inputs
        joint = {(x_j, x_k): strategy.receiver[x_j * m_k + x_k]
                 for x_j in range(m_j) for x_k in range(m_k)}
        columns = {}
        if strategy.direction is Direction.FORWARD:
            columns.update({f"{_letter(j)}{x}": v for x, v in enumerate(strategy.sender)})
            columns.update({f"{_letter(k)}{_digits(*key)}": v for key, v in joint.items()})
        else:
            columns.update({f"{_letter(j)}{_digits(*key)}": v for key, v in joint.items()})
            columns.update({f"{_letter(k)}{x}": v for x, v in enumerate(strategy.sender)})
        return columns

    def decomposition_frames(self, decomposition: ToblDecomposition) -> Dict[str, pd.DataFrame]:
        """One table per bipartition and direction, rows sharing λ across directions"""
        frames = {}
        for bipartition in decomposition.bipartitions():
            i, j, k = bipartition.value
            for direction in Direction:
                rows = []
                for n, term in enumerate(decomposition.terms[bipartition], 1):
                    row: Dict[str, Any] = {'λ': n, 'p_λ': format_rational(term.weight)}
                    row.update({f"{_letter(i)}{x}": v for x, v in enumerate(term.solo.assignment)})
                    pair = term.forward if direction is Direction.FORWARD else term.backward
                    row.update(self._pair_columns(pair, j, k))
                    rows.append(row)
                frames[sheet_name(bipartition, direction)] = pd.DataFrame(rows)
        return frames

    def local_model_frame(self, model: LocalModel) -> pd.DataFrame:
        rows = []
        for n, term in enumerate(model.terms, 1):
            row: Dict[str, Any] = {'λ': n, 'p_λ': format_rational(term.weight)}
            for party, strategy in enumerate(term.strategies):
                row.update({f"{_letter(party)}{x}": v for x, v in enumerate(strategy.assignment)})
            rows.append(row)
        return pd.DataFrame(rows)

    # --- files ----------------------------------------------------------------

    def export_tables(self, frames: Dict[str, pd.DataFrame], name: str,
                      format: str = 'xlsx') -> List[Path]:
        if format not in TABLE_FORMATS:
            raise ValueError(f"Unsupported format: {format}")
        if format == 'csv':
            paths = []
            for sheet, frame in frames.items():
                filepath = self.output_dir / f"{name}_{sheet.replace(' ', '_')}.csv"
                frame.to_csv(filepath, index=self._keeps_index(frame))
                paths.append(filepath)
        else:
            paths = [self._export_to_excel(frames, name)]
        logger.info(f"Exported {len(frames)} tables for {name} to {self.output_dir}")
        return paths

    def export_behavior(self, behavior: Behavior, name: str, format: str = 'xlsx') -> List[Path]:
        return self.export_tables({'behavior': self.behavior_frame(behavior)}, name, format)

    def export_decomposition(self, decomposition: ToblDecomposition, name: str,
                             format: str = 'xlsx') -> List[Path]:
        return self.export_tables(self.decomposition_frames(decomposition), name, format)

    def export_local_model(self, model: LocalModel, name: str, format: str = 'xlsx') -> List[Path]:
        return self.export_tables({'local model': self.local_model_frame(model)}, name, format)

    @staticmethod
    def _keeps_index(frame: pd.DataFrame) -> bool:
        return frame.index.name is not None

    def _export_to_excel(self, frames: Dict[str, pd.DataFrame], name: str) -> Path:
        """One sheet per table, columns sized to their content"""
        filepath = self.output_dir / f"{name}.xlsx"

        with pd.ExcelWriter(filepath, engine='openpyxl') as writer:
            for sheet, frame in frames.items():
                frame.to_excel(writer, sheet_name=sheet[:31], index=self._keeps_index(frame))

            for worksheet in writer.sheets.values():
                for column in worksheet.columns:
                    max_length = max((len(str(cell.value)) for cell in column if cell.value is not None),
                                     default=0)
                    worksheet.column_dimensions[column[0].column_letter].width = min(max_length + 2, 50)

        return filepath

