from .brute_force import BruteForceLocator, brute_force_locate
from .neighbour_walk import NeighbourWalk, neighbour_walk_locate
from .aux_grid import CandidateListGrid, aux_grid_locate

__all__ = ['BruteForceLocator', 'brute_force_locate', 'NeighbourWalk', 'neighbour_walk_locate',
           'CandidateListGrid', 'aux_grid_locate']
