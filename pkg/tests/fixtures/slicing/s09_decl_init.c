/* target: buf  keep: 4 7 8 */
void init(int *buf, int n)
{
    int lim = n / 2;
    int x = 3;
    int i;
    for (i = 0; i < lim; i++)
        buf[i] = 0;
}
