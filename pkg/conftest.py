import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'rheoflame.settings')
django.setup()
