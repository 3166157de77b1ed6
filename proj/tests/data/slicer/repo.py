class Repo:
    def load(self, path, retries=3):
        data = None
        for attempt in range(retries):
            try:
                with open(path) as fh:
                    data = fh.read()
            except OSError:
                if attempt == retries - 1:
                    raise
            else:
                break
        result = data.splitlines() if data else []
        return result
