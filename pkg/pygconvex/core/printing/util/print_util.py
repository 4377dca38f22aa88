from typing import List, Union

from beautifultable import BeautifulTable, ALIGN_LEFT

from pygconvex.core.printing.tablefyable import Tablefyable


def format_cell(value):
    """ Floats are printed with 6 significant digits, everything else via str. """
    if isinstance(value, float):
        return "%.6g" % value
    if value is None:
        return "-"
    return str(value)


def get_default_table():
    # cells are formatted by format_cell, numeric detection would reformat them
    table = BeautifulTable(maxwidth=250, default_alignment=ALIGN_LEFT, detect_numerics=False)
    table.set_style(BeautifulTable.STYLE_COMPACT)
    return table


def to_table(clz, objects: Union[Tablefyable, List[Tablefyable]], columns=None, table=None, print_empty=True):
    if not isinstance(objects, list):
        objects = [objects]
    if clz is None and objects:
        clz = objects[0].__class__
    if table is None:
        table = get_default_table()
    if columns is None:
        header = clz.tablefy_header()
    else:
        header = clz.tablefy_header(*columns)
    rows = [[format_cell(x) for x in obj.tablefy_to_row(*header)] for obj in objects]
    if print_empty and not rows and header:
        rows = [["-" for _ in header]]
    # the header can only be set once the table has its columns
    for row in rows:
        table.rows.append(row)
    if rows:
        table.columns.header = header
    return table
