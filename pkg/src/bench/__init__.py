from .report import BenchReport, MethodRun, ReportFormatter, emit_report, load_report
from .experiment import Trajectory, generate_trajectory, run_experiment, run_suite
from .commands import build_command, gen_mesh_command, locate_command, read_points, write_outcomes

__all__ = ['BenchReport', 'MethodRun', 'ReportFormatter', 'emit_report', 'load_report', 'Trajectory',
           'generate_trajectory', 'run_experiment', 'run_suite', 'build_command', 'gen_mesh_command',
           'locate_command', 'read_points', 'write_outcomes']
