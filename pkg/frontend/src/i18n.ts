/** Session-local label catalog; the server ships merged catalogs per tag. */

export class Labels {
  private catalog: Record<string, string> = {};
  locale = "en";

  async load(locale: string): Promise<void> {
    const response = await fetch(`/locales/${encodeURIComponent(locale)}.json`);
    this.catalog = (await response.json()) as Record<string, string>;
    this.locale = locale;
  }

  use(catalog: Record<string, string>, locale: string): void {
    this.catalog = catalog;
    this.locale = locale;
  }

  t(key: string): string {
    return this.catalog[key] ?? key;
  }
}
