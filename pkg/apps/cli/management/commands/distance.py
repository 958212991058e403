"""
Management команда: отчёт об операционном расстоянии для пар состояний
"""
from apps.cli.base import RunCommand


class Command(RunCommand):
    help = 'Считает D_total, ||rho1 - rho2||^2, fidelity и информационное содержание для каждого seed'
    command_name = 'distance'
