"""
Management команда: сравнение порядков, задаваемых fidelity и расстоянием
"""
from apps.cli.base import RunCommand
from apps.cli.services import ORDERING_MODES


class Command(RunCommand):
    help = 'Ищет нарушения эквивалентности F и D для смешанных и чистых тестовых состояний'
    command_name = 'ordering'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--mode',
            choices=ORDERING_MODES,
            default='both',
            help='Какие тестовые состояния использовать (по умолчанию: both)'
        )
