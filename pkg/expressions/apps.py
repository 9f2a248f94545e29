from django.apps import AppConfig


class ExpressionsConfig(AppConfig):
    name = 'expressions'
    verbose_name = 'Coefficient expressions'
