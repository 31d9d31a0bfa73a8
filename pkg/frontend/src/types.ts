export interface GridSize {
  w: number;
  h: number;
}

export interface CellRecord {
  col: number;
  row: number;
  sample: string;
  cluster: string;
  meta: Record<string, string> | null;
  assigned: string[];
}

export interface MeasureReport {
  proximity: number;
  compactness: number;
  area_ratio: number;
  triple_ratio: number;
  perimeter_ratio: number;
  cut_ratio: number;
  raw: { prox2: number; comp: number };
}

export interface LayoutPayload {
  node: string;
  parent: string | null;
  grid: GridSize;
  cells: CellRecord[];
  breadcrumb: string[];
  report: MeasureReport;
}

export interface ConfigPayload {
  grid: GridSize;
  pipeline: string;
  seed: number;
  palette: Record<string, string>;
}

export interface ApiErrorPayload {
  error: string;
  detail: string;
}
