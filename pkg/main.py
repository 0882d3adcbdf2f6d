import logging
import time

from portrait_engine.cli import cli

logger = logging.getLogger("portrait_engine.main")


def main():
    start_total = time.time()
    try:
        cli(standalone_mode=True)
    finally:
        logger.debug("total elapsed: %.2fs", time.time() - start_total)


# Call the main function when the script is executed directly
if __name__ == "__main__":
    main()
