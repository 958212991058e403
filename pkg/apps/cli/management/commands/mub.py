"""
Management команда: построение, проверка и экспорт полного набора MUB
"""
from apps.cli.base import RunCommand


class Command(RunCommand):
    help = 'Строит полный набор взаимно дополнительных базисов для простого d и проверяет его'
    command_name = 'mub'
