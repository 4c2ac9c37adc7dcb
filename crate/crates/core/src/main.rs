fn main() {
    std::process::exit(inner_bernstein::harness::run_cli(std::env::args_os()));
}
