import csv
import logging
from pathlib import Path

import orjson
from pydantic import BaseModel, TypeAdapter

logger = logging.getLogger(__name__)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


def _prepare(path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def load_json(path):
    """
    The load_json function reads and decodes a JSON document.

    :param path: str | Path: File to read
    :return: The decoded document
    """
    return orjson.loads(Path(path).read_bytes())


def load_model(schema, path):
    """
    The load_model function validates a JSON file against a pydantic model or type adapter.

    :param schema: type[BaseModel] | TypeAdapter: Schema of the document
    :param path: str | Path: File to read
    :return: The validated model
    """
    data = load_json(path)
    if isinstance(schema, TypeAdapter):
        return schema.validate_python(data)
    return schema.model_validate(data)


def dump_json(document, path) -> Path:
    """
    The dump_json function writes a model (or plain data) as indented JSON with sorted keys,
    so equal documents are equal byte for byte.

    :param document: BaseModel | list | dict: Data to write
    :param path: str | Path: Destination
    :return: Path: The written file
    """
    path = _prepare(path)
    if isinstance(document, BaseModel):
        document = document.model_dump(mode='json')
    elif isinstance(document, list):
        document = [d.model_dump(mode='json') if isinstance(d, BaseModel) else d for d in document]
    path.write_bytes(orjson.dumps(document, option=JSON_OPTIONS) + b'\n')
    logger.info('wrote %s', path)
    return path


def write_csv(rows: list[dict], path, columns: list[str]) -> Path:
    """
    The write_csv function writes dict rows under a fixed header.

    :param rows: list[dict]: Rows keyed by column
    :param path: str | Path: Destination
    :param columns: list[str]: Header, in order
    :return: Path: The written file
    """
    path = _prepare(path)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.DictWriter(f, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row[c] for c in columns})
    logger.info('wrote %s', path)
    return path


def write_markdown(title: str, sections: dict[str, list[str]], path) -> Path:
    """
    The write_markdown function writes a human-readable report: a title and one bullet list per section.

    :param title: str: Document title
    :param sections: dict[str, list[str]]: Section heading to bullet lines
    :param path: str | Path: Destination
    :return: Path: The written file
    """
    path = _prepare(path)
    lines = [f'# {title}', '']
    for heading, bullets in sections.items():
        lines += [f'## {heading}', '']
        lines += [f'- {b}' for b in bullets]
        lines.append('')
    path.write_text('\n'.join(lines), encoding='utf-8')
    logger.info('wrote %s', path)
    return path
