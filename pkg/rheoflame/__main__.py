"""``python -m rheoflame <command> <scenario.json>``, run from the project root."""
import sys

from manage import main

if __name__ == '__main__':
    main(['rheoflame', *sys.argv[1:]])
