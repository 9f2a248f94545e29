from django.apps import AppConfig


class WavefrontConfig(AppConfig):
    name = 'wavefront'
    verbose_name = 'Wavefront nets'
