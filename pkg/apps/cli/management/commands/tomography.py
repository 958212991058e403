"""
Management команда: поляризационная томография кубита
"""
from apps.cli.base import RunCommand


class Command(RunCommand):
    help = 'Моделирует три установки поляризатора и восстанавливает параметры Стокса (только d=2)'
    command_name = 'tomography'
    default_pair = 'h45'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--bias-corrected',
            action='store_true',
            help='Вычитать смещение sum f(1-f)/(n-1)'
        )
