from .spec import GridSpec, cell_of_point, grid_spec_from_metrics, spacing_bound
from .table import CellTable, dump_cell_table
from .passes import mark_active_cells, iter_box_pairs

__all__ = ['GridSpec', 'cell_of_point', 'grid_spec_from_metrics', 'spacing_bound',
           'CellTable', 'dump_cell_table', 'mark_active_cells', 'iter_box_pairs']
