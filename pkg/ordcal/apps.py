from django.apps import AppConfig


class OrdcalConfig(AppConfig):
    name = 'ordcal'
    verbose_name = 'Ordinal risk models'

    def ready(self):
        from . import conf  # noqa: F401
