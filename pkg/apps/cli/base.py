"""
Общая база management-команд: флаги запуска и перевод ошибок в коды выхода.
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from apps.cli.services import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    FORMATS,
    PAIR_KINDS,
    ConfigError,
    build_config,
    run_command,
)
from apps.linalg.services import ConvergenceError, OpdistError

logger = logging.getLogger(__name__)


class RunCommand(BaseCommand):
    command_name = ""
    default_pair = "mixed"

    def add_arguments(self, parser):
        parser.add_argument('--dim', type=int, default=2, help='Размерность гильбертова пространства (простое число)')
        parser.add_argument('--trials', type=int, help='Число испытаний (по умолчанию из настроек)')
        parser.add_argument('--seed', dest='seeds', type=int, action='append',
                            help='Seed ГСЧ, можно указать несколько раз')
        parser.add_argument('--shots', dest='shots', type=int, action='append',
                            help='Число повторов на базис, можно указать несколько раз')
        parser.add_argument('--tol', dest='tolerance', type=float, help='Допуск проверки')
        parser.add_argument('--out', type=Path, help='Путь к файлу результата')
        parser.add_argument('--format', dest='fmt', choices=FORMATS, help='Формат результата')
        parser.add_argument('--pair', choices=PAIR_KINDS, default=self.default_pair,
                            help=f'Вид пары состояний (по умолчанию: {self.default_pair})')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        try:
            cfg = build_config(self.command_name, **options)
            self.stdout.write(f'🚀 {self.command_name}: d={cfg.dim}, seeds={list(cfg.seeds)}')
            result = run_command(cfg)
        except (ConfigError, ConvergenceError) as e:
            raise self._fail(e, EXIT_CONFIG if isinstance(e, ConfigError) else EXIT_CHECK_FAILED)
        except OSError as e:
            raise self._fail(e, EXIT_IO)
        except OpdistError as e:
            # неподдерживаемая размерность и прочие ошибки области определения
            raise self._fail(e, EXIT_CONFIG)

        for path in result.paths:
            self.stdout.write(f'📄 {path}')
        if result.exit_code == EXIT_OK:
            self.stdout.write(self.style.SUCCESS(f'✅ {result.message}'))
            return
        self.stdout.write(self.style.WARNING(f'⚠️ {result.message}'))
        raise CommandError(result.message, returncode=result.exit_code)

    def _fail(self, error: Exception, code: int) -> CommandError:
        self.stderr.write(self.style.ERROR(f'❌ {error}'))
        logger.error(f'{self.command_name} failed with exit code {code}: {error}')
        return CommandError(str(error), returncode=code)
