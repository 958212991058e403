"""
Management команда: сходимость оценки по конечному числу повторов
"""
from apps.cli.base import RunCommand


class Command(RunCommand):
    help = 'Серия оценок D_total по частотам для разных n и seed с наклоном log-log'
    command_name = 'shots'
    default_pair = 'pure'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--bias-corrected',
            action='store_true',
            help='Вычитать смещение sum f(1-f)/(n-1)'
        )
