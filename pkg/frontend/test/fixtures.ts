import { readFileSync } from 'node:fs';
import { fileURLToPath } from 'node:url';
import { dirname, join } from 'node:path';

import type { DashboardDoc } from '../src/types.js';

const HERE = dirname(fileURLToPath(import.meta.url));

export const REPO_ROOT = join(HERE, '..', '..');
export const SALES_MINI_PATH = join(REPO_ROOT, 'tests', 'data', 'sales-mini.json');

export function salesMini(): DashboardDoc {
  return JSON.parse(readFileSync(SALES_MINI_PATH, 'utf-8')) as DashboardDoc;
}
