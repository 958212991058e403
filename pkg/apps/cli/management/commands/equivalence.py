"""
Management команда: численная проверка D_total = ||rho1 - rho2||^2
"""
from apps.cli.base import RunCommand


class Command(RunCommand):
    help = 'Проверяет совпадение операционного расстояния и расстояния Гильберта-Шмидта'
    command_name = 'equivalence'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--self-test',
            action='store_true',
            help='Отрицательный контроль: заменить последний базис копией первого'
        )
