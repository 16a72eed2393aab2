import os
import tempfile


def read_file(file_path):
    with open(file_path, 'r', encoding='utf-8') as file:
        return file.read()


def write_file(file_path, content):
    """Write content so that readers never observe a half-written file."""
    directory = os.path.dirname(os.path.abspath(file_path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.tmp-', suffix=os.path.basename(file_path))
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as file:
            file.write(content)
        os.replace(tmp_path, file_path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def remove_file(file_path):
    """Remove a file if it exists; return whether something was removed."""
    if os.path.isfile(file_path):
        os.remove(file_path)
        return True
    return False
