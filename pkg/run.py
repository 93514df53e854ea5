# File: run.py
# This file's only job is to create and run the CLI.
from infowalk import main

if __name__ == '__main__':
    main()
