import sys

# Load environment variables from .env file if it exists
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

from failcluster.cli import main

if __name__ == "__main__":
    sys.exit(main())
