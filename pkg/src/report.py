"""Rendering of value listings and verification reports (json, csv, text)."""
import io
import json
from datetime import datetime, timezone

import pandas as pd

FORMATS = ('json', 'csv', 'text')


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(',', ':'))
    return str(value)


def _frame_to_csv(rows):
    frame = pd.DataFrame([{key: _cell(value) for key, value in row.items()} for row in rows])
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator='\n')
    return buffer.getvalue()


def render_values(values, fmt='text', start=0):
    """Coefficient listing: comma-separated text, ``n,value`` csv or a json array."""
    values = [int(v) for v in values]
    if fmt == 'json':
        return json.dumps(values) + '\n'
    if fmt == 'csv':
        return _frame_to_csv([{'n': start + i, 'value': v} for i, v in enumerate(values)])
    return ','.join(str(v) for v in values) + '\n'


def _targets(body):
    return body['targets'] if 'targets' in body else [body]


def report_rows(body):
    """Flatten a report into one row per family, residual check or identity check."""
    rows = []
    for target in _targets(body):
        items = target.get('families') or target.get('checks')
        if not items:
            summary = {key: value for key, value in target.items() if key != 'target'}
            rows.append({'target': target['target'], **summary})
            continue
        for item in items:
            rows.append({'target': target['target'], **item})
    return rows


def _text_line(target_name, item):
    if 'A' in item:
        progression = f"{item['B']}" if item['A'] is None else f"{item['A']}n+{item['B']}"
        return (f"  [{item['status']}] {progression} = {item['expected']} mod {item['mod']}: "
                f"{item['n_checked']} checked, {len(item['counterexamples'])} counterexamples ({item['provenance']})")
    if 'relation' in item:
        modulus = f" mod {item['modulus']}" if item['modulus'] else ''
        return (f"  [{item['status']}] {item['relation']} p={item['p']}{modulus}: "
                f"{item['zero_count']}/{item['n_checked']} residuals zero")
    if 'holds' in item:
        mark = 'holds' if item['holds'] else f"fails at q^{item['first_mismatch']}"
        return f"  {item['name']} (order {item['order']}): {mark}"
    return f"  {target_name}: {item}"


def render_text(body):
    lines = []
    for target in _targets(body):
        lines.append(f"{target['target']}: {target['status']}")
        if 'error' in target:
            lines.append(f"  error: {target['error']}")
        for case in target.get('cases', []):
            lines.append(f"  p={case['p']} delta={case['delta']} parity={case['pend_delta_parity']} -> {case['case']}")
        for fit in target.get('alphas', []):
            lines.append(f"  alpha({fit['p']}) = {fit['alpha']}, omega parity {fit['omega_parity']}")
        for item in target.get('families') or target.get('checks') or []:
            lines.append(_text_line(target['target'], item))
        if 'first_mismatch' in target:
            lines.append(f"  order {target['order']} ({target['backend']}): first mismatch {target['first_mismatch']}")
    if 'targets' in body:
        lines.append(f"overall: {body['status']}")
    return '\n'.join(lines) + '\n'


def render(body, fmt='json'):
    if fmt == 'json':
        return json.dumps(body, indent=2) + '\n'
    if fmt == 'csv':
        return _frame_to_csv(report_rows(body))
    return render_text(body)


def envelope(body):
    """Wrap a report body with its generation time; the body itself stays timestamp-free."""
    return {
        'generated_at': datetime.now(timezone.utc).isoformat(),
        'report': body,
    }
