from pathlib import Path


def ensure_out_dir(directory: str | Path) -> Path:
    """
    Returns the output directory, creating it (and its parents) when missing.

    :param directory: The output directory.
    :type directory: str | Path
    :return: The directory path.
    :rtype: Path
    :raises NotADirectoryError: If the path exists and is not a directory.
    """
    path = Path(directory)
    if path.exists() and not path.is_dir():
        raise NotADirectoryError(f"{path} is not a directory.")
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_text(path: str | Path, text: str) -> Path:
    """
    Writes ``text`` to ``path`` as UTF-8 with Unix line endings.

    :return: The written path.
    :rtype: Path
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as stream:
        stream.write(text)
    return path
